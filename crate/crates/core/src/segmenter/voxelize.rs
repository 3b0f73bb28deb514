use crate::geom::{norm, scale, sub};
use crate::spheremesh::IcoMesh;
use crate::volume::{Geometry, Mask3D};
use crate::{Error, Result, WorldPoint};

/// Slack on the radial inside test, in mm.
const RADIAL_EPS: f64 = 1e-9;

/// Rasterizes the star-shaped surface with per-ray radii `radii` around
/// `seed` onto `geometry`.
///
/// A voxel center `q` is inside when `|q - seed|` does not exceed the
/// radius interpolated barycentrically on the mesh face hit by the
/// direction `q - seed`. The voxel holding the seed is always inside.
pub fn voxelize(mesh: &IcoMesh, radii: &[f64], seed: WorldPoint, geometry: &Geometry) -> Result<Mask3D> {
    if radii.len() != mesh.vertex_count() {
        return Err(Error::InvalidParams(format!(
            "{} radii for {} rays",
            radii.len(),
            mesh.vertex_count()
        )));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidParams("radii must be positive".into()));
    }
    let rho_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let rho_max = radii.iter().copied().fold(0.0, f64::max);

    let mut mask = Mask3D::empty(*geometry);
    let dims = geometry.dims;
    let lo = geometry.world_to_voxel(seed.offset([1.0, 1.0, 1.0], -rho_max));
    let hi = geometry.world_to_voxel(seed.offset([1.0, 1.0, 1.0], rho_max));
    let range = |axis: usize| {
        let (a, b) = if lo[axis] <= hi[axis] { (lo[axis], hi[axis]) } else { (hi[axis], lo[axis]) };
        let first = a.floor().max(0.0) as usize;
        let last = (b.ceil().max(-1.0) as i64).min(dims[axis] as i64 - 1);
        first..(last + 1).max(0) as usize
    };
    let (ri, rj, rk) = (range(0), range(1), range(2));

    let origin = seed.to_array();
    let mut hint = 0;
    for k in rk {
        for j in rj.clone() {
            for i in ri.clone() {
                let q = geometry.voxel_to_world([i as f64, j as f64, k as f64]).to_array();
                let v = sub(q, origin);
                let dist = norm(v);
                let inside = if dist <= rho_min + RADIAL_EPS {
                    true
                } else if dist > rho_max + RADIAL_EPS {
                    false
                } else {
                    let (face, w) = mesh.locate_from(scale(v, 1.0 / dist), hint);
                    hint = face;
                    let [a, b, c] = mesh.faces()[face];
                    dist <= w[0] * radii[a] + w[1] * radii[b] + w[2] * radii[c] + RADIAL_EPS
                };
                if inside {
                    mask.set(i, j, k, true);
                }
            }
        }
    }
    if let Some([i, j, k]) = geometry.nearest_voxel(seed) {
        mask.set(i, j, k, true);
    }
    Ok(mask)
}
