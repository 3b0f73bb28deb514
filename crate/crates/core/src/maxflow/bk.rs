//! Boykov-Kolmogorov max-flow over a compressed forward-star graph.
//!
//! Every input arc becomes a pair of residual arcs (`sister` links them).
//! Nodes belong to the source tree, the sink tree, or neither; `parent`
//! holds the residual arc from a node towards its tree root.

use std::collections::VecDeque;
use std::time::Instant;

use super::{CutResult, FlowNetwork, SolveStats};

const NONE: u32 = u32::MAX;
const TERMINAL: u32 = u32::MAX - 1;
const ORPHAN: u32 = u32::MAX - 2;
const INFINITE_D: u32 = u32::MAX;

struct Solver {
    first: Vec<usize>,
    head: Vec<u32>,
    sister: Vec<u32>,
    r_cap: Vec<f64>,

    tr_cap: Vec<f64>,
    parent: Vec<u32>,
    is_sink: Vec<bool>,
    ts: Vec<u64>,
    dist: Vec<u32>,
    in_active: Vec<bool>,

    active: VecDeque<usize>,
    orphans: VecDeque<usize>,
    time: u64,
    flow: f64,
    augmentations: usize,
}

impl Solver {
    fn new(net: &FlowNetwork) -> (Self, Vec<usize>) {
        let n = net.node_count();
        let m = net.arcs().len();
        assert!(2 * m < ORPHAN as usize, "too many arcs");

        let mut first = vec![0usize; n + 1];
        for a in net.arcs() {
            first[a.tail + 1] += 1;
            first[a.head + 1] += 1;
        }
        for v in 0..n {
            first[v + 1] += first[v];
        }
        let mut fill = first.clone();
        let mut head = vec![0u32; 2 * m];
        let mut sister = vec![0u32; 2 * m];
        let mut r_cap = vec![0.0; 2 * m];
        let mut forward = Vec::with_capacity(m);
        for a in net.arcs() {
            let fwd = fill[a.tail];
            fill[a.tail] += 1;
            let rev = fill[a.head];
            fill[a.head] += 1;
            head[fwd] = a.head as u32;
            head[rev] = a.tail as u32;
            sister[fwd] = rev as u32;
            sister[rev] = fwd as u32;
            r_cap[fwd] = a.cap;
            forward.push(fwd);
        }

        let mut flow = net.direct();
        let mut tr_cap = vec![0.0; n];
        for v in 0..n {
            let (s, t) = (net.source_caps()[v], net.sink_caps()[v]);
            flow += s.min(t);
            tr_cap[v] = s - t;
        }

        let solver = Self {
            first,
            head,
            sister,
            r_cap,
            tr_cap,
            parent: vec![NONE; n],
            is_sink: vec![false; n],
            ts: vec![0; n],
            dist: vec![0; n],
            in_active: vec![false; n],
            active: VecDeque::new(),
            orphans: VecDeque::new(),
            time: 0,
            flow,
            augmentations: 0,
        };
        (solver, forward)
    }

    fn set_active(&mut self, v: usize) {
        if !self.in_active[v] {
            self.in_active[v] = true;
            self.active.push_back(v);
        }
    }

    fn next_active(&mut self) -> Option<usize> {
        while let Some(v) = self.active.pop_front() {
            self.in_active[v] = false;
            if self.parent[v] != NONE {
                return Some(v);
            }
        }
        None
    }

    fn init_trees(&mut self) {
        for v in 0..self.tr_cap.len() {
            if self.tr_cap[v] != 0.0 {
                self.is_sink[v] = self.tr_cap[v] < 0.0;
                self.parent[v] = TERMINAL;
                self.dist[v] = 1;
                self.set_active(v);
            }
        }
    }

    /// Grows the tree of `i` by one layer; returns the arc joining the two
    /// trees, oriented from the source tree to the sink tree.
    fn grow(&mut self, i: usize) -> Option<usize> {
        let sink_tree = self.is_sink[i];
        for a in self.first[i]..self.first[i + 1] {
            let residual = if sink_tree { self.r_cap[self.sister[a] as usize] } else { self.r_cap[a] };
            if residual <= 0.0 {
                continue;
            }
            let j = self.head[a] as usize;
            if self.parent[j] == NONE {
                self.is_sink[j] = sink_tree;
                self.parent[j] = self.sister[a];
                self.ts[j] = self.ts[i];
                self.dist[j] = self.dist[i] + 1;
                self.set_active(j);
            } else if self.is_sink[j] != sink_tree {
                return Some(if sink_tree { self.sister[a] as usize } else { a });
            } else if self.ts[j] <= self.ts[i] && self.dist[j] > self.dist[i] {
                // shorter path to the root through i
                self.parent[j] = self.sister[a];
                self.ts[j] = self.ts[i];
                self.dist[j] = self.dist[i] + 1;
            }
        }
        None
    }

    fn set_orphan_front(&mut self, v: usize) {
        self.parent[v] = ORPHAN;
        self.orphans.push_front(v);
    }

    fn set_orphan_rear(&mut self, v: usize) {
        self.parent[v] = ORPHAN;
        self.orphans.push_back(v);
    }

    fn augment(&mut self, middle: usize) {
        let mut bottleneck = self.r_cap[middle];

        let mut i = self.head[self.sister[middle] as usize] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            bottleneck = bottleneck.min(self.r_cap[self.sister[a] as usize]);
            i = self.head[a] as usize;
        }
        bottleneck = bottleneck.min(self.tr_cap[i]);

        let mut i = self.head[middle] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            bottleneck = bottleneck.min(self.r_cap[a]);
            i = self.head[a] as usize;
        }
        bottleneck = bottleneck.min(-self.tr_cap[i]);

        self.r_cap[self.sister[middle] as usize] += bottleneck;
        self.r_cap[middle] -= bottleneck;

        let mut i = self.head[self.sister[middle] as usize] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            let s = self.sister[a] as usize;
            self.r_cap[a] += bottleneck;
            self.r_cap[s] -= bottleneck;
            if self.r_cap[s] <= 0.0 {
                self.set_orphan_front(i);
            }
            i = self.head[a] as usize;
        }
        self.tr_cap[i] -= bottleneck;
        if self.tr_cap[i] <= 0.0 {
            self.set_orphan_front(i);
        }

        let mut i = self.head[middle] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            let s = self.sister[a] as usize;
            self.r_cap[s] += bottleneck;
            self.r_cap[a] -= bottleneck;
            if self.r_cap[a] <= 0.0 {
                self.set_orphan_front(i);
            }
            i = self.head[a] as usize;
        }
        self.tr_cap[i] += bottleneck;
        if self.tr_cap[i] >= 0.0 {
            self.set_orphan_front(i);
        }

        self.flow += bottleneck;
        self.augmentations += 1;
    }

    /// Distance of `j` to its tree root, or `INFINITE_D` if the path runs
    /// through an orphan. Marks the visited path with the current time.
    fn origin_distance(&mut self, j: usize) -> u32 {
        let mut d = 0u32;
        let mut k = j;
        loop {
            if self.ts[k] == self.time {
                d += self.dist[k];
                break;
            }
            let a = self.parent[k];
            d += 1;
            if a == TERMINAL {
                self.ts[k] = self.time;
                self.dist[k] = 1;
                break;
            }
            if a == ORPHAN {
                return INFINITE_D;
            }
            k = self.head[a as usize] as usize;
        }
        let mut k = j;
        let mut dd = d;
        while self.ts[k] != self.time {
            self.ts[k] = self.time;
            self.dist[k] = dd;
            dd = dd.saturating_sub(1);
            k = self.head[self.parent[k] as usize] as usize;
        }
        d
    }

    fn process_orphan(&mut self, i: usize) {
        let sink_tree = self.is_sink[i];
        let mut best_arc = NONE;
        let mut best_d = INFINITE_D;

        for a0 in self.first[i]..self.first[i + 1] {
            let residual =
                if sink_tree { self.r_cap[a0] } else { self.r_cap[self.sister[a0] as usize] };
            if residual <= 0.0 {
                continue;
            }
            let j = self.head[a0] as usize;
            if self.is_sink[j] != sink_tree || self.parent[j] == NONE {
                continue;
            }
            let d = self.origin_distance(j);
            if d < best_d {
                best_arc = a0 as u32;
                best_d = d;
            }
        }

        self.parent[i] = best_arc;
        if best_arc != NONE {
            self.ts[i] = self.time;
            self.dist[i] = best_d + 1;
            return;
        }

        // no valid parent: i becomes free; its children become orphans
        for a0 in self.first[i]..self.first[i + 1] {
            let j = self.head[a0] as usize;
            let a = self.parent[j];
            if self.is_sink[j] != sink_tree || a == NONE {
                continue;
            }
            let residual =
                if sink_tree { self.r_cap[a0] } else { self.r_cap[self.sister[a0] as usize] };
            if residual > 0.0 {
                self.set_active(j);
            }
            if a != TERMINAL && a != ORPHAN && self.head[a as usize] as usize == i {
                self.set_orphan_rear(j);
            }
        }
    }

    fn run(&mut self) {
        self.init_trees();
        let mut current: Option<usize> = None;
        loop {
            let i = match current.take() {
                Some(i) if self.parent[i] != NONE => i,
                _ => match self.next_active() {
                    Some(i) => i,
                    None => break,
                },
            };
            let joint = self.grow(i);
            self.time += 1;
            if let Some(a) = joint {
                current = Some(i);
                self.augment(a);
                while let Some(o) = self.orphans.pop_front() {
                    self.process_orphan(o);
                }
            }
        }
    }

    /// Nodes that cannot reach the sink in the residual graph.
    fn source_side(&self, tol: f64) -> Vec<bool> {
        let n = self.tr_cap.len();
        let mut reaches_sink = vec![false; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if self.tr_cap[v] < -tol {
                reaches_sink[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            for a in self.first[u]..self.first[u + 1] {
                let j = self.head[a] as usize;
                if !reaches_sink[j] && self.r_cap[self.sister[a] as usize] > tol {
                    reaches_sink[j] = true;
                    queue.push_back(j);
                }
            }
        }
        reaches_sink.into_iter().map(|r| !r).collect()
    }
}

pub(super) fn solve(net: &FlowNetwork) -> CutResult {
    let start = Instant::now();
    let (mut solver, forward) = Solver::new(net);
    solver.run();

    let tol = 1e-12 * net.sink_caps().iter().copied().fold(0.0, f64::max);
    let source_side = solver.source_side(tol);

    let arc_flows = forward.iter().map(|&a| solver.r_cap[solver.sister[a] as usize]).collect();
    let n = net.node_count();
    let mut source_flows = vec![0.0; n];
    let mut sink_flows = vec![0.0; n];
    for v in 0..n {
        let (s, t) = (net.source_caps()[v], net.sink_caps()[v]);
        let (initial, last) = (s - t, solver.tr_cap[v]);
        if initial >= 0.0 {
            source_flows[v] = t + (initial - last);
            sink_flows[v] = t;
        } else {
            source_flows[v] = s;
            sink_flows[v] = s + (last - initial);
        }
    }

    CutResult {
        flow_value: solver.flow,
        source_side,
        arc_flows,
        source_flows,
        sink_flows,
        stats: SolveStats { augmentations: solver.augmentations, elapsed: start.elapsed() },
    }
}
