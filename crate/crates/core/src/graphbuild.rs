//! Ray sampling, node costs and flow-network assembly.
//!
//! Node `(r, z)` is the `z`-th sample on ray `r`, at distance
//! `(z + 1) * L / Z` from the seed. A boundary vector picks one node per
//! ray; the nodes at or below it form a closed set under two families of
//! uncuttable arcs:
//!
//! - along each ray, `(r, z) -> (r, z - 1)`;
//! - between mesh-adjacent rays, `(r, z) -> (r', max(0, z - Δr))`, which
//!   bounds the boundary jump between neighbours by `Δr`.
//!
//! Terminal weights telescope the boundary cost table so that the weight
//! of a closed set equals the summed cost of its boundary nodes (plus a
//! constant), and the minimum s-t cut yields the cheapest smooth boundary.

use serde::{Deserialize, Serialize};

use crate::maxflow::FlowNetwork;
use crate::spheremesh::{IcoMesh, MAX_LEVEL};
use crate::volume::{OutOfBounds, Volume3D};
use crate::{Error, Result, WorldPoint};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OobPolicy {
    /// Samples outside the volume read 0 and their nodes get the
    /// out-of-bounds penalty cost.
    #[default]
    ZeroIntensity,
    /// Samples are clamped to the nearest voxel center and costed normally.
    ClampToEdge,
}

/// How per-node intensity deviations become per-boundary costs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CostModel {
    /// Region cost: a boundary at `z` pays `max(0, d - θ)` for every node
    /// it encloses and `max(0, θ - d)` for every node it leaves outside,
    /// where `d = |I - μ|` and `θ = tolerance * max d`. Nodes whose
    /// intensity lies within `θ` of the seed mean are pulled inside.
    Region { tolerance: f64 },
    /// The boundary node's own deviation `|I - μ|`.
    Deviation,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::Region { tolerance: 0.5 }
    }
}

/// Where the voxelized surface sits relative to the boundary node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfacePlacement {
    /// At the boundary node itself, `(z + 1) * L / Z` from the seed.
    Node,
    /// Halfway between the boundary node and the next node out, capped
    /// at the ray length. The object edge lies somewhere in that gap, so
    /// this removes the half-step inward bias of [`SurfacePlacement::Node`].
    #[default]
    Midpoint,
}

impl SurfacePlacement {
    /// Surface radius for boundary node `z` on a ray of `nodes_per_ray`
    /// nodes spaced `step` apart.
    pub fn radius(self, z: usize, nodes_per_ray: usize, step: f64) -> f64 {
        let node = (z + 1) as f64 * step;
        match self {
            SurfacePlacement::Node => node,
            SurfacePlacement::Midpoint => (node + 0.5 * step).min(nodes_per_ray as f64 * step),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentationParams {
    /// Icosphere refinement level; 5 gives 2432 rays, 6 gives 7292.
    pub mesh_level: usize,
    pub nodes_per_ray: usize,
    pub ray_length_mm: f64,
    /// Largest boundary-index jump allowed between adjacent rays.
    pub delta_r: usize,
    /// Radius of the ball around the seed used for the mean intensity.
    pub seed_stat_radius_mm: f64,
    pub oob_policy: OobPolicy,
    pub cost_model: CostModel,
    pub surface: SurfacePlacement,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            mesh_level: 5,
            nodes_per_ray: 50,
            ray_length_mm: 50.0,
            delta_r: 1,
            seed_stat_radius_mm: 2.0,
            oob_policy: OobPolicy::default(),
            cost_model: CostModel::default(),
            surface: SurfacePlacement::default(),
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.mesh_level > MAX_LEVEL {
            return Err(Error::MeshLevelTooLarge(self.mesh_level));
        }
        if self.nodes_per_ray < 2 {
            return bad(format!("nodes_per_ray = {} must be at least 2", self.nodes_per_ray));
        }
        if !(self.ray_length_mm.is_finite() && self.ray_length_mm > 0.0) {
            return bad(format!("ray_length_mm = {} must be positive", self.ray_length_mm));
        }
        if self.delta_r > self.nodes_per_ray - 1 {
            return bad(format!(
                "delta_r = {} exceeds nodes_per_ray - 1 = {}",
                self.delta_r,
                self.nodes_per_ray - 1
            ));
        }
        if !(self.seed_stat_radius_mm.is_finite() && self.seed_stat_radius_mm > 0.0) {
            return bad(format!("seed_stat_radius_mm = {} must be positive", self.seed_stat_radius_mm));
        }
        if let CostModel::Region { tolerance } = self.cost_model {
            if !(0.0..=1.0).contains(&tolerance) {
                return bad(format!("region tolerance {tolerance} must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Distance between consecutive nodes on a ray.
    pub fn step_mm(&self) -> f64 {
        self.ray_length_mm / self.nodes_per_ray as f64
    }
}

/// Node samples along every ray, indexed `r * Z + z`.
#[derive(Clone, Debug)]
pub struct RaySamples {
    pub rays: usize,
    pub nodes_per_ray: usize,
    pub step_mm: f64,
    pub oob_policy: OobPolicy,
    pub positions: Vec<WorldPoint>,
    pub intensities: Vec<f64>,
    pub out_of_bounds: Vec<bool>,
}

impl RaySamples {
    #[inline]
    pub fn index(&self, r: usize, z: usize) -> usize {
        r * self.nodes_per_ray + z
    }

    /// Whether node `n` takes the out-of-bounds penalty instead of an
    /// intensity cost.
    pub fn penalized(&self, n: usize) -> bool {
        self.out_of_bounds[n] && self.oob_policy == OobPolicy::ZeroIntensity
    }
}

/// Mean intensity over the ball of radius `radius` around `seed`, sampled
/// on a lattice of step `min(spacing) / 2`. Out-of-bounds lattice points
/// are skipped.
pub fn estimate_seed_mean(vol: &Volume3D, seed: WorldPoint, radius: f64) -> Result<f64> {
    if !vol.geometry().contains(seed) {
        return Err(Error::SeedOutOfBounds(seed));
    }
    let step = vol.spacing().iter().copied().fold(f64::INFINITY, f64::min) / 2.0;
    let n = (radius / step).floor() as i64;
    let r2 = radius * radius * (1.0 + 1e-12);
    let (mut sum, mut count) = (0.0, 0usize);
    for k in -n..=n {
        for j in -n..=n {
            for i in -n..=n {
                let off = [i as f64 * step, j as f64 * step, k as f64 * step];
                if off[0] * off[0] + off[1] * off[1] + off[2] * off[2] > r2 {
                    continue;
                }
                let s = vol.sample_trilinear(seed.offset(off, 1.0));
                if s.in_bounds {
                    sum += s.value;
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptySeedNeighbourhood);
    }
    Ok(sum / count as f64)
}

/// Samples `Z` nodes along the ray through every mesh vertex.
pub fn sample_rays(
    vol: &Volume3D,
    seed: WorldPoint,
    mesh: &IcoMesh,
    params: &SegmentationParams,
) -> Result<RaySamples> {
    params.validate()?;
    if !vol.geometry().contains(seed) {
        return Err(Error::SeedOutOfBounds(seed));
    }
    let z_count = params.nodes_per_ray;
    let step = params.step_mm();
    let oob = match params.oob_policy {
        OobPolicy::ZeroIntensity => OutOfBounds::Value(0.0),
        OobPolicy::ClampToEdge => OutOfBounds::ClampToEdge,
    };
    let total = mesh.vertex_count() * z_count;
    let mut positions = Vec::with_capacity(total);
    let mut intensities = Vec::with_capacity(total);
    let mut out_of_bounds = Vec::with_capacity(total);
    for &dir in mesh.vertices() {
        for z in 0..z_count {
            let p = seed.offset(dir, (z + 1) as f64 * step);
            let s = vol.sample_with(p, oob);
            positions.push(p);
            intensities.push(s.value);
            out_of_bounds.push(!s.in_bounds);
        }
    }
    Ok(RaySamples {
        rays: mesh.vertex_count(),
        nodes_per_ray: z_count,
        step_mm: step,
        oob_policy: params.oob_policy,
        positions,
        intensities,
        out_of_bounds,
    })
}

/// Per-node deviation `|I - μ|`. Penalized out-of-bounds nodes get the
/// largest in-bounds deviation plus one.
pub fn node_costs(samples: &RaySamples, mean: f64) -> Vec<f64> {
    let mut costs: Vec<f64> = samples.intensities.iter().map(|&i| (i - mean).abs()).collect();
    let max_in_bounds = (0..costs.len())
        .filter(|&n| !samples.penalized(n))
        .map(|n| costs[n])
        .fold(0.0, f64::max);
    for (n, c) in costs.iter_mut().enumerate() {
        if samples.penalized(n) {
            *c = max_in_bounds + 1.0;
        }
    }
    costs
}

/// Cost of placing the boundary of ray `r` at node `z`, indexed `r * Z + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostTable {
    rays: usize,
    nodes_per_ray: usize,
    values: Vec<f64>,
}

impl CostTable {
    pub fn new(rays: usize, nodes_per_ray: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rays * nodes_per_ray {
            return Err(Error::InvalidParams(format!(
                "{} costs for {rays} rays x {nodes_per_ray} nodes",
                values.len()
            )));
        }
        if values.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidParams("costs must be finite and non-negative".into()));
        }
        Ok(Self { rays, nodes_per_ray, values })
    }

    pub fn rays(&self) -> usize {
        self.rays
    }

    pub fn nodes_per_ray(&self) -> usize {
        self.nodes_per_ray
    }

    #[inline]
    pub fn get(&self, r: usize, z: usize) -> f64 {
        self.values[r * self.nodes_per_ray + z]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_r c(r, z_r)`.
    pub fn objective(&self, boundary: &[usize]) -> f64 {
        boundary.iter().enumerate().map(|(r, &z)| self.get(r, z)).sum()
    }
}

/// Turns per-node deviations into the boundary cost table.
pub fn boundary_costs(samples: &RaySamples, deviation: &[f64], model: CostModel) -> Result<CostTable> {
    let (rays, z_count) = (samples.rays, samples.nodes_per_ray);
    let values = match model {
        CostModel::Deviation => deviation.to_vec(),
        CostModel::Region { tolerance } => {
            let max_dev = (0..deviation.len())
                .filter(|&n| !samples.penalized(n))
                .map(|n| deviation[n])
                .fold(0.0, f64::max);
            let theta = tolerance * max_dev;
            let mut values = vec![0.0; deviation.len()];
            for r in 0..rays {
                let ray = &deviation[r * z_count..(r + 1) * z_count];
                // cost with every node outside, then move the boundary out
                let mut c: f64 = ray.iter().map(|&d| (theta - d).max(0.0)).sum();
                for (z, &d) in ray.iter().enumerate() {
                    c += (d - theta).max(0.0) - (theta - d).max(0.0);
                    values[r * z_count + z] = c.max(0.0);
                }
            }
            values
        }
    };
    CostTable::new(rays, z_count, values)
}

/// Flow network over the ray nodes plus bookkeeping for reading the cut.
#[derive(Clone, Debug)]
pub struct RayGraph {
    pub network: FlowNetwork,
    pub rays: usize,
    pub nodes_per_ray: usize,
    pub delta_r: usize,
    /// Pull on every innermost node keeping it inside the object.
    pub force: f64,
    /// Capacity of the structural arcs.
    pub inf: f64,
    /// Number of along-ray arcs (stored first).
    pub z_arcs: usize,
    /// Number of inter-ray arcs (stored after the along-ray arcs).
    pub r_arcs: usize,
}

impl RayGraph {
    #[inline]
    pub fn node(&self, r: usize, z: usize) -> usize {
        r * self.nodes_per_ray + z
    }

    /// Boundary vector `z_r = max { z : (r, z) on the source side }`.
    pub fn boundary_from_cut(&self, source_side: &[bool]) -> Result<Vec<usize>> {
        (0..self.rays)
            .map(|r| {
                let ray = &source_side[self.node(r, 0)..self.node(r, 0) + self.nodes_per_ray];
                let top = ray.iter().rposition(|&s| s).ok_or_else(|| {
                    Error::Invariant(format!("ray {r} has no node on the source side"))
                })?;
                if !ray[..=top].iter().all(|&s| s) {
                    return Err(Error::Invariant(format!("ray {r} is not closed below its boundary")));
                }
                Ok(top)
            })
            .collect()
    }

    /// The source side induced by a boundary vector.
    pub fn source_side_for(&self, boundary: &[usize]) -> Vec<bool> {
        let mut side = vec![false; self.rays * self.nodes_per_ray];
        for (r, &zr) in boundary.iter().enumerate() {
            for z in 0..=zr {
                side[self.node(r, z)] = true;
            }
        }
        side
    }

    /// Whether any structural arc leaves the source side.
    pub fn cuts_structural_arc(&self, source_side: &[bool]) -> bool {
        self.network
            .arcs()
            .iter()
            .any(|a| source_side[a.tail] && !source_side[a.head])
    }
}

/// Assembles the network for `costs` under the adjacency smoothness
/// constraint `|z_r - z_r'| <= delta_r`.
pub fn build_flow_network(costs: &CostTable, adjacency: &[Vec<usize>], delta_r: usize) -> Result<RayGraph> {
    let (rays, z_count) = (costs.rays(), costs.nodes_per_ray());
    if adjacency.len() != rays {
        return Err(Error::InvalidParams(format!(
            "adjacency has {} rays, costs have {rays}",
            adjacency.len()
        )));
    }
    if z_count < 1 || adjacency.iter().flatten().any(|&r| r >= rays) {
        return Err(Error::InvalidParams("inconsistent cost table and adjacency".into()));
    }

    let force = costs.values().iter().sum::<f64>() + 1.0;
    let mut weights = vec![0.0; rays * z_count];
    for r in 0..rays {
        weights[r * z_count] = costs.get(r, 0) - force;
        for z in 1..z_count {
            weights[r * z_count + z] = costs.get(r, z) - costs.get(r, z - 1);
        }
    }
    let inf = weights.iter().map(|w| w.abs()).sum::<f64>() + 1.0;

    let z_arcs = rays * (z_count - 1);
    let r_arcs = adjacency.iter().map(Vec::len).sum::<usize>() * z_count;
    let mut network = FlowNetwork::with_arc_capacity(rays * z_count, z_arcs + r_arcs);
    for (n, &w) in weights.iter().enumerate() {
        if w < 0.0 {
            network.add_source(n, -w);
        } else if w > 0.0 {
            network.add_sink(n, w);
        }
    }
    for r in 0..rays {
        for z in 1..z_count {
            network.add_arc(r * z_count + z, r * z_count + z - 1, inf);
        }
    }
    for (r, neighbours) in adjacency.iter().enumerate() {
        for &rn in neighbours {
            for z in 0..z_count {
                network.add_arc(r * z_count + z, rn * z_count + z.saturating_sub(delta_r), inf);
            }
        }
    }

    Ok(RayGraph { network, rays, nodes_per_ray: z_count, delta_r, force, inf, z_arcs, r_arcs })
}

/// Whether `boundary` satisfies `|z_r - z_r'| <= delta_r` on every
/// adjacent pair.
pub fn is_smooth(boundary: &[usize], adjacency: &[Vec<usize>], delta_r: usize) -> bool {
    adjacency
        .iter()
        .enumerate()
        .all(|(r, ns)| ns.iter().all(|&rn| boundary[r].abs_diff(boundary[rn]) <= delta_r))
}
