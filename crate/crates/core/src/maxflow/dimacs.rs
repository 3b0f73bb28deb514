//! DIMACS max-flow text: `p max N M`, `n ID s`, `n ID t`, `a U V CAP`.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::FlowNetwork;
use crate::{Error, Result};

pub(super) fn write(net: &FlowNetwork) -> String {
    let n = net.node_count();
    let (s, t) = (n + 1, n + 2);
    let terminal_arcs = net.source_caps().iter().filter(|&&c| c > 0.0).count()
        + net.sink_caps().iter().filter(|&&c| c > 0.0).count()
        + usize::from(net.direct() > 0.0);
    let mut out = String::new();
    writeln!(out, "c spherecut flow network").unwrap();
    writeln!(out, "p max {} {}", n + 2, terminal_arcs + net.arcs().len()).unwrap();
    writeln!(out, "n {s} s").unwrap();
    writeln!(out, "n {t} t").unwrap();
    if net.direct() > 0.0 {
        writeln!(out, "a {s} {t} {}", net.direct()).unwrap();
    }
    for (v, &c) in net.source_caps().iter().enumerate() {
        if c > 0.0 {
            writeln!(out, "a {s} {} {c}", v + 1).unwrap();
        }
    }
    for (v, &c) in net.sink_caps().iter().enumerate() {
        if c > 0.0 {
            writeln!(out, "a {} {t} {c}", v + 1).unwrap();
        }
    }
    for a in net.arcs() {
        writeln!(out, "a {} {} {}", a.tail + 1, a.head + 1, a.cap).unwrap();
    }
    out
}

/// Parses DIMACS max-flow text. Non-terminal node ids are renumbered
/// `0..N-2` in increasing id order. Arcs into the source or out of the
/// sink cannot carry flow and are dropped, as are self-loops.
pub fn parse_dimacs(text: &str) -> Result<FlowNetwork> {
    let err = |line: usize, msg: &str| Error::Dimacs { line, msg: msg.to_string() };
    let mut problem: Option<(usize, usize)> = None;
    let (mut source, mut sink) = (None, None);
    let mut raw_arcs = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") => {}
            Some("p") => {
                if fields.next() != Some("max") {
                    return Err(err(line_no, "expected `p max N M`"));
                }
                let nodes = parse_field::<usize>(fields.next(), line_no)?;
                let arcs = parse_field::<usize>(fields.next(), line_no)?;
                problem = Some((nodes, arcs));
            }
            Some("n") => {
                let id = parse_field::<usize>(fields.next(), line_no)?;
                match fields.next() {
                    Some("s") => source = Some(id),
                    Some("t") => sink = Some(id),
                    _ => return Err(err(line_no, "node designator must be `s` or `t`")),
                }
            }
            Some("a") => {
                let u = parse_field::<usize>(fields.next(), line_no)?;
                let v = parse_field::<usize>(fields.next(), line_no)?;
                let cap = parse_field::<f64>(fields.next(), line_no)?;
                if !(cap.is_finite() && cap >= 0.0) {
                    return Err(err(line_no, "capacity must be finite and non-negative"));
                }
                raw_arcs.push((line_no, u, v, cap));
            }
            Some(other) => return Err(err(line_no, &format!("unknown record `{other}`"))),
        }
    }

    let (nodes, arc_count) = problem.ok_or_else(|| err(0, "missing problem line"))?;
    let s = source.ok_or_else(|| err(0, "missing source designator"))?;
    let t = sink.ok_or_else(|| err(0, "missing sink designator"))?;
    if s == t {
        return Err(err(0, "source and sink coincide"));
    }
    if raw_arcs.len() != arc_count {
        return Err(err(0, &format!("problem line announces {arc_count} arcs, found {}", raw_arcs.len())));
    }

    let mut index = BTreeMap::new();
    for id in 1..=nodes {
        if id != s && id != t {
            let next = index.len();
            index.insert(id, next);
        }
    }
    let mut net = FlowNetwork::new(index.len());
    for (line_no, u, v, cap) in raw_arcs {
        if u == 0 || v == 0 || u > nodes || v > nodes {
            return Err(err(line_no, "node id out of range"));
        }
        if u == v || v == s || u == t {
            continue;
        }
        match (u == s, v == t) {
            (true, true) => net.add_direct(cap),
            (true, false) => net.add_source(index[&v], cap),
            (false, true) => net.add_sink(index[&u], cap),
            (false, false) => net.add_arc(index[&u], index[&v], cap),
        }
    }
    Ok(net)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize) -> Result<T> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| Error::Dimacs { line, msg: "missing or malformed number".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxflow::max_flow;

    #[test]
    fn round_trip_preserves_network() {
        let mut net = FlowNetwork::new(3);
        net.add_source(0, 2.5);
        net.add_sink(2, 1e-7);
        net.add_arc(0, 1, 0.1);
        net.add_arc(1, 2, 3.0);
        net.add_direct(4.0);
        let text = net.to_dimacs();
        assert!(text.contains("p max 5 5"));
        assert!(text.contains("n 4 s") && text.contains("n 5 t"));
        assert_eq!(parse_dimacs(&text).unwrap(), net);
    }

    #[test]
    fn foreign_numbering() {
        // source 1, sink 4, as in the classic DIMACS examples
        let text = "c example\np max 4 5\nn 1 s\nn 4 t\na 1 2 4\na 1 3 2\na 2 3 3\na 2 4 1\na 3 4 5\n";
        let net = parse_dimacs(text).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(max_flow(&net).flow_value, 6.0);
    }

    #[test]
    fn malformed_input() {
        assert!(parse_dimacs("p max 2 1\nn 1 s\nn 2 t\na 1 2 x\n").is_err());
        assert!(parse_dimacs("n 1 s\nn 2 t\n").is_err());
        assert!(parse_dimacs("p max 2 2\nn 1 s\nn 2 t\na 1 2 1\n").is_err());
        assert!(parse_dimacs("p max 2 1\nn 1 s\nn 2 t\na 1 3 1\n").is_err());
        assert!(parse_dimacs("p max 2 1\nn 1 s\nn 2 t\na 1 2 -1\n").is_err());
    }
}
