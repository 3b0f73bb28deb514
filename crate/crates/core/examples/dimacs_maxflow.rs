//! Solves a DIMACS max-flow file with the tree-reuse solver and, for small
//! inputs, checks the value against exhaustive enumeration.
//!
//! cargo run --example dimacs_maxflow -- network.dimacs

use spherecut::maxflow::{brute_force_min_cut, max_flow, parse_dimacs, BRUTE_FORCE_MAX_NODES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => "p max 4 5\nn 1 s\nn 4 t\na 1 2 3\na 1 3 2\na 2 3 1\na 2 4 2\na 3 4 3\n".to_string(),
    };
    let net = parse_dimacs(&text)?;
    let cut = max_flow(&net);
    println!("flow        {}", cut.flow_value);
    println!("augmented   {} paths in {:?}", cut.stats.augmentations, cut.stats.elapsed);
    let side: String = cut.source_side.iter().map(|&s| if s { 'S' } else { 'T' }).collect();
    println!("cut         {side}");
    if net.node_count() <= BRUTE_FORCE_MAX_NODES {
        let (value, _) = brute_force_min_cut(&net)?;
        println!("brute force {value}");
    }
    Ok(())
}
