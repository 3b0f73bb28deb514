use super::FlowNetwork;
use crate::{Error, Result};

/// Largest node count [`brute_force_min_cut`] accepts.
pub const BRUTE_FORCE_MAX_NODES: usize = 20;

/// Minimum cut by enumerating all `2^n` source sides. Returns the value
/// and the lexicographically least optimal source side (`false < true`,
/// node 0 most significant).
pub fn brute_force_min_cut(net: &FlowNetwork) -> Result<(f64, Vec<bool>)> {
    let n = net.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::TooLarge(format!(
            "{n} nodes (brute force is limited to {BRUTE_FORCE_MAX_NODES})"
        )));
    }
    let mut best_value = f64::INFINITY;
    let mut best_side: Vec<bool> = Vec::new();
    let mut side = vec![false; n];
    for bits in 0u32..(1u32 << n) {
        for (v, s) in side.iter_mut().enumerate() {
            *s = bits >> v & 1 == 1;
        }
        let value = net.cut_capacity(&side);
        let tie = best_value.is_finite() && (value - best_value).abs() <= 1e-9 * best_value.abs().max(1.0);
        if (value < best_value && !tie) || (tie && side < best_side) {
            best_value = value;
            best_side.clone_from(&side);
        }
    }
    Ok((best_value, best_side))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographically_least_tie() {
        // every cut costs 0: the empty source side wins
        let net = FlowNetwork::new(3);
        assert_eq!(brute_force_min_cut(&net).unwrap(), (0.0, vec![false; 3]));

        // node 0 must be on the source side, node 1 is free
        let mut net = FlowNetwork::new(2);
        net.add_source(0, 5.0);
        assert_eq!(brute_force_min_cut(&net).unwrap(), (0.0, vec![true, false]));
    }

    #[test]
    fn too_many_nodes() {
        assert!(matches!(brute_force_min_cut(&FlowNetwork::new(21)), Err(Error::TooLarge(_))));
    }
}
