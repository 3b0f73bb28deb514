use crate::graphbuild::CostTable;
use crate::{Error, Result};

/// Largest instance [`enumerate_optimal_surface`] accepts.
pub const ENUMERATION_MAX_RAYS: usize = 12;
pub const ENUMERATION_MAX_NODES: usize = 4;

/// Exhaustive minimum of `Σ_r c(r, z_r)` over smooth boundary vectors.
///
/// Returns the objective and the lexicographically least minimizer. The
/// search assigns rays in index order with increasing `z`, pruning on the
/// smoothness constraint and on a per-ray lower bound.
pub fn enumerate_optimal_surface(
    costs: &CostTable,
    adjacency: &[Vec<usize>],
    delta_r: usize,
) -> Result<(f64, Vec<usize>)> {
    let (rays, z_count) = (costs.rays(), costs.nodes_per_ray());
    if rays > ENUMERATION_MAX_RAYS || z_count > ENUMERATION_MAX_NODES {
        return Err(Error::TooLarge(format!(
            "exhaustive search limited to {ENUMERATION_MAX_RAYS} rays x {ENUMERATION_MAX_NODES} nodes, got {rays} x {z_count}"
        )));
    }
    if adjacency.len() != rays {
        return Err(Error::InvalidParams("adjacency does not match the cost table".into()));
    }
    // suffix sums of per-ray minima
    let mut bound = vec![0.0; rays + 1];
    for r in (0..rays).rev() {
        let min = (0..z_count).map(|z| costs.get(r, z)).fold(f64::INFINITY, f64::min);
        bound[r] = bound[r + 1] + min;
    }

    let mut search = Search {
        costs,
        adjacency,
        delta_r,
        bound,
        current: vec![0; rays],
        best: None,
    };
    search.visit(0, 0.0);
    let best = search.best.expect("the constant vector is always smooth");
    Ok(best)
}

struct Search<'a> {
    costs: &'a CostTable,
    adjacency: &'a [Vec<usize>],
    delta_r: usize,
    bound: Vec<f64>,
    current: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn visit(&mut self, r: usize, partial: f64) {
        if let Some((best, _)) = &self.best {
            let slack = 1e-9 * best.abs().max(1.0);
            if partial + self.bound[r] > best + slack {
                return;
            }
        }
        if r == self.current.len() {
            let objective = self.costs.objective(&self.current);
            if self.best.as_ref().is_none_or(|(best, _)| objective < *best) {
                self.best = Some((objective, self.current.clone()));
            }
            return;
        }
        for z in 0..self.costs.nodes_per_ray() {
            let fits = self.adjacency[r]
                .iter()
                .filter(|&&rn| rn < r)
                .all(|&rn| self.current[rn].abs_diff(z) <= self.delta_r);
            if fits {
                self.current[r] = z;
                self.visit(r + 1, partial + self.costs.get(r, z));
            }
        }
    }
}
