//! s-t maximum flow / minimum cut.
//!
//! [`max_flow`] runs the Boykov-Kolmogorov augmenting-path algorithm (two
//! search trees grown from the terminals, orphan adoption after each
//! augmentation). [`brute_force_min_cut`] enumerates every partition of
//! small networks and serves as the reference oracle.
//!
//! The source and sink are implicit: a network holds `n` ordinary nodes,
//! per-node terminal capacities `s -> v` and `v -> t`, ordinary arcs, and
//! an optional direct `s -> t` capacity.

mod bk;
mod brute;
mod dimacs;

use std::time::Duration;

use serde::Serialize;

pub use brute::{brute_force_min_cut, BRUTE_FORCE_MAX_NODES};
pub use dimacs::parse_dimacs;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub cap: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowNetwork {
    source_caps: Vec<f64>,
    sink_caps: Vec<f64>,
    arcs: Vec<Arc>,
    direct: f64,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            source_caps: vec![0.0; nodes],
            sink_caps: vec![0.0; nodes],
            arcs: Vec::new(),
            direct: 0.0,
        }
    }

    pub fn with_arc_capacity(nodes: usize, arcs: usize) -> Self {
        let mut net = Self::new(nodes);
        net.arcs.reserve(arcs);
        net
    }

    pub fn node_count(&self) -> usize {
        self.source_caps.len()
    }

    /// Adds capacity to `s -> v`.
    pub fn add_source(&mut self, v: usize, cap: f64) {
        debug_assert!(cap >= 0.0);
        self.source_caps[v] += cap;
    }

    /// Adds capacity to `v -> t`.
    pub fn add_sink(&mut self, v: usize, cap: f64) {
        debug_assert!(cap >= 0.0);
        self.sink_caps[v] += cap;
    }

    /// Adds capacity to the direct `s -> t` arc.
    pub fn add_direct(&mut self, cap: f64) {
        self.direct += cap;
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, cap: f64) {
        debug_assert!(cap >= 0.0 && tail < self.node_count() && head < self.node_count());
        self.arcs.push(Arc { tail, head, cap });
    }

    pub fn source_caps(&self) -> &[f64] {
        &self.source_caps
    }

    pub fn sink_caps(&self) -> &[f64] {
        &self.sink_caps
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn direct(&self) -> f64 {
        self.direct
    }

    /// Total capacity of all terminal arcs, including `s -> t`.
    pub fn terminal_capacity(&self) -> f64 {
        self.source_caps.iter().sum::<f64>() + self.sink_caps.iter().sum::<f64>() + self.direct
    }

    /// Capacity of the cut whose source side is `source_side` (plus `s`).
    pub fn cut_capacity(&self, source_side: &[bool]) -> f64 {
        let mut total = self.direct;
        for v in 0..self.node_count() {
            total += if source_side[v] { self.sink_caps[v] } else { self.source_caps[v] };
        }
        for a in &self.arcs {
            if source_side[a.tail] && !source_side[a.head] {
                total += a.cap;
            }
        }
        total
    }

    /// DIMACS max-flow text. Ordinary nodes are numbered `1..=n`, the
    /// source is `n+1` and the sink `n+2`.
    pub fn to_dimacs(&self) -> String {
        dimacs::write(self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub augmentations: usize,
    #[serde(serialize_with = "serialize_ms")]
    pub elapsed: Duration,
}

fn serialize_ms<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

/// Outcome of a max-flow solve.
#[derive(Clone, Debug)]
pub struct CutResult {
    pub flow_value: f64,
    /// Per ordinary node; the source is always on the source side and the
    /// sink never is.
    pub source_side: Vec<bool>,
    /// Final flow on every arc, in insertion order.
    pub arc_flows: Vec<f64>,
    /// Final flow on `s -> v` and `v -> t` for every node.
    pub source_flows: Vec<f64>,
    pub sink_flows: Vec<f64>,
    pub stats: SolveStats,
}

/// Maximum flow and the canonical minimum cut.
///
/// The source side is the complement of the set of nodes that can still
/// reach the sink in the final residual graph. This is the largest
/// minimum cut, so ties between equally cheap closed sets resolve to the
/// biggest one, and the result is unique for a given network.
pub fn max_flow(net: &FlowNetwork) -> CutResult {
    bk::solve(net)
}
