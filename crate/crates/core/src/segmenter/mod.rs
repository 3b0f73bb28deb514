//! End-to-end pipeline: seed, rays, costs, network, cut, boundary, mask.

mod enumerate;
mod report;
mod voxelize;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::graphbuild::{
    boundary_costs, build_flow_network, estimate_seed_mean, is_smooth, node_costs, sample_rays,
    CostTable, RayGraph, SegmentationParams,
};
use crate::maxflow::{max_flow, CutResult, SolveStats};
use crate::spheremesh::{mesh_at_level, vertex_adjacency};
use crate::volume::{Mask3D, Volume3D};
use crate::{Error, Result, WorldPoint};

pub use enumerate::{enumerate_optimal_surface, ENUMERATION_MAX_NODES, ENUMERATION_MAX_RAYS};
pub use report::SegmentationReport;
pub use voxelize::voxelize;

/// Wall time of each pipeline stage, in milliseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub mesh: f64,
    pub rays: f64,
    pub costs: f64,
    pub graph: f64,
    pub cut: f64,
    pub voxelize: f64,
    pub total: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Clone, Debug)]
pub struct SegmentationResult {
    pub seed: WorldPoint,
    pub params: SegmentationParams,
    /// Mean intensity around the seed.
    pub seed_mean: f64,
    /// Boundary node per ray, in `0..nodes_per_ray`.
    pub boundary_index: Vec<usize>,
    /// World position of every boundary node.
    pub boundary_points: Vec<WorldPoint>,
    /// Radius of the voxelized surface on every ray.
    pub boundary_radii: Vec<f64>,
    pub mask: Mask3D,
    /// `Σ_r c(r, z_r)` for the selected boundary.
    pub objective: f64,
    pub flow_value: f64,
    pub solver: SolveStats,
    pub timings: Timings,
    pub warnings: Vec<String>,
}

impl SegmentationResult {
    pub fn report(&self) -> SegmentationReport {
        SegmentationReport::from_result(self)
    }
}

/// Optimal smooth surface for a cost table, read off the minimum cut.
#[derive(Clone, Debug)]
pub struct SurfaceSolution {
    pub boundary: Vec<usize>,
    pub objective: f64,
    pub flow_value: f64,
    pub stats: SolveStats,
}

/// Minimum of `Σ_r c(r, z_r)` over boundary vectors with
/// `|z_r - z_r'| <= delta_r` on adjacent rays, via max-flow.
pub fn solve_surface(costs: &CostTable, adjacency: &[Vec<usize>], delta_r: usize) -> Result<SurfaceSolution> {
    let graph = build_flow_network(costs, adjacency, delta_r)?;
    let cut = max_flow(&graph.network);
    read_surface(&graph, &cut, costs, adjacency)
}

fn read_surface(
    graph: &RayGraph,
    cut: &CutResult,
    costs: &CostTable,
    adjacency: &[Vec<usize>],
) -> Result<SurfaceSolution> {
    if graph.cuts_structural_arc(&cut.source_side) {
        return Err(Error::Invariant("minimum cut crosses a structural arc".into()));
    }
    let boundary = graph.boundary_from_cut(&cut.source_side)?;
    if !is_smooth(&boundary, adjacency, graph.delta_r) {
        return Err(Error::Invariant("boundary violates the smoothness constraint".into()));
    }
    Ok(SurfaceSolution {
        objective: costs.objective(&boundary),
        boundary,
        flow_value: cut.flow_value,
        stats: cut.stats,
    })
}

/// The flow network [`segment`] would solve, for inspection or export.
pub fn segmentation_network(vol: &Volume3D, seed: WorldPoint, params: &SegmentationParams) -> Result<RayGraph> {
    params.validate()?;
    if !seed.is_finite() || !vol.geometry().contains(seed) {
        return Err(Error::SeedOutOfBounds(seed));
    }
    let mesh = mesh_at_level(params.mesh_level)?;
    let seed_mean = estimate_seed_mean(vol, seed, params.seed_stat_radius_mm)?;
    let samples = sample_rays(vol, seed, &mesh, params)?;
    let costs = boundary_costs(&samples, &node_costs(&samples, seed_mean), params.cost_model)?;
    build_flow_network(&costs, &vertex_adjacency(&mesh), params.delta_r)
}

/// Segments the blob containing `seed`.
pub fn segment(vol: &Volume3D, seed: WorldPoint, params: &SegmentationParams) -> Result<SegmentationResult> {
    params.validate()?;
    if !seed.is_finite() || !vol.geometry().contains(seed) {
        return Err(Error::SeedOutOfBounds(seed));
    }
    let start = Instant::now();
    let mut timings = Timings::default();
    let mut warnings = Vec::new();

    let t = Instant::now();
    let mesh = mesh_at_level(params.mesh_level)?;
    let adjacency = vertex_adjacency(&mesh);
    timings.mesh = ms(t.elapsed());

    let t = Instant::now();
    let seed_mean = estimate_seed_mean(vol, seed, params.seed_stat_radius_mm)?;
    let samples = sample_rays(vol, seed, &mesh, params)?;
    timings.rays = ms(t.elapsed());

    let t = Instant::now();
    let deviation = node_costs(&samples, seed_mean);
    let uniform = (0..deviation.len()).all(|n| samples.penalized(n) || deviation[n] == 0.0);
    let costs = boundary_costs(&samples, &deviation, params.cost_model)?;
    timings.costs = ms(t.elapsed());
    if uniform {
        let msg = "intensity is constant along every in-bounds ray; the result is the full ball".to_string();
        tracing::warn!("{msg}");
        warnings.push(msg);
    }

    let t = Instant::now();
    let graph = build_flow_network(&costs, &adjacency, params.delta_r)?;
    timings.graph = ms(t.elapsed());

    let t = Instant::now();
    let cut = max_flow(&graph.network);
    let surface = read_surface(&graph, &cut, &costs, &adjacency)?;
    timings.cut = ms(t.elapsed());

    let step = params.step_mm();
    let boundary_radii: Vec<f64> = surface
        .boundary
        .iter()
        .map(|&z| params.surface.radius(z, params.nodes_per_ray, step))
        .collect();
    let boundary_points = mesh
        .vertices()
        .iter()
        .zip(&surface.boundary)
        .map(|(&dir, &z)| seed.offset(dir, (z + 1) as f64 * step))
        .collect();

    let t = Instant::now();
    let mask = voxelize(&mesh, &boundary_radii, seed, vol.geometry())?;
    timings.voxelize = ms(t.elapsed());
    timings.total = ms(start.elapsed());

    tracing::debug!(
        rays = mesh.vertex_count(),
        objective = surface.objective,
        voxels = mask.count(),
        total_ms = timings.total,
        "segmentation done"
    );

    Ok(SegmentationResult {
        seed,
        params: *params,
        seed_mean,
        boundary_index: surface.boundary,
        boundary_points,
        boundary_radii,
        mask,
        objective: surface.objective,
        flow_value: surface.flow_value,
        solver: surface.stats,
        timings,
        warnings,
    })
}
