use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::volume::{Geometry, Mask3D, Volume3D};
use crate::{Error, Result, WorldPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhantomShape {
    Sphere,
    Ellipsoid,
}

/// Synthetic volume with an ellipsoidal object of known extent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub shape: PhantomShape,
    /// Semi-axes along x, y, z in mm; all equal for a sphere.
    pub semi_axes_mm: [f64; 3],
    /// Object center; the grid center when `None`.
    pub center: Option<WorldPoint>,
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub object_intensity: f64,
    pub background_intensity: f64,
    /// Standard deviation of additive Gaussian noise.
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl PhantomSpec {
    /// Sphere of radius `r` mm in a 128³ grid at 1 mm, object 200 on
    /// background 0, no noise.
    pub fn sphere(r: f64) -> Self {
        Self {
            shape: PhantomShape::Sphere,
            semi_axes_mm: [r; 3],
            center: None,
            dims: [128; 3],
            spacing: [1.0; 3],
            object_intensity: 200.0,
            background_intensity: 0.0,
            noise_sigma: 0.0,
            rng_seed: 0,
        }
    }

    /// Axis-aligned ellipsoid with the same defaults as [`PhantomSpec::sphere`].
    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Self {
        Self { shape: PhantomShape::Ellipsoid, semi_axes_mm: [a, b, c], ..Self::sphere(a) }
    }

    pub fn with_noise(self, sigma: f64, rng_seed: u64) -> Self {
        Self { noise_sigma: sigma, rng_seed, ..self }
    }

    /// Analytic object volume in cm³.
    pub fn analytic_volume_cm3(&self) -> f64 {
        let [a, b, c] = self.semi_axes_mm;
        4.0 / 3.0 * std::f64::consts::PI * a * b * c / 1000.0
    }
}

/// Builds the phantom volume and its ground-truth mask.
///
/// A voxel is in the truth mask when its center satisfies the ellipsoid
/// inequality. Noise is drawn in storage order from a ChaCha8 stream
/// seeded with `rng_seed`, so a spec always yields the same volume.
pub fn make_phantom(spec: &PhantomSpec) -> Result<(Volume3D, Mask3D)> {
    let geometry = Geometry::new(spec.dims, spec.spacing, [0.0; 3])?;
    let axes = spec.semi_axes_mm;
    if axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::InvalidParams(format!("semi-axes {axes:?} must be positive")));
    }
    if spec.shape == PhantomShape::Sphere && !(axes[0] == axes[1] && axes[1] == axes[2]) {
        return Err(Error::InvalidParams("a sphere needs equal semi-axes".into()));
    }
    if !(spec.noise_sigma.is_finite() && spec.noise_sigma >= 0.0) {
        return Err(Error::InvalidParams(format!("noise sigma {} must be non-negative", spec.noise_sigma)));
    }
    let center = spec.center.unwrap_or_else(|| geometry.center()).to_array();
    for a in 0..3 {
        let extent = (spec.dims[a] - 1) as f64 * spec.spacing[a];
        if center[a] - axes[a] < 0.0 || center[a] + axes[a] > extent {
            return Err(Error::InvalidParams(format!(
                "object spans [{:.2}, {:.2}] mm on axis {a}, grid covers [0, {extent:.2}]",
                center[a] - axes[a],
                center[a] + axes[a]
            )));
        }
    }

    let truth: Vec<bool> = (0..geometry.voxel_count())
        .map(|n| {
            let q = geometry.voxel_to_world(geometry.coords(n).map(|c| c as f64)).to_array();
            (0..3).map(|a| ((q[a] - center[a]) / axes[a]).powi(2)).sum::<f64>() <= 1.0
        })
        .collect();

    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let data = truth
        .iter()
        .map(|&inside| {
            let base = if inside { spec.object_intensity } else { spec.background_intensity };
            if spec.noise_sigma > 0.0 {
                (base + noise.sample(&mut rng)) as f32
            } else {
                base as f32
            }
        })
        .collect();

    Ok((Volume3D::new(geometry, data)?, Mask3D::new(geometry, truth)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_sphere_is_two_valued() {
        let spec = PhantomSpec { dims: [48; 3], ..PhantomSpec::sphere(20.0) };
        let (vol, truth) = make_phantom(&spec).unwrap();
        for (v, t) in vol.data().iter().zip(truth.data()) {
            assert_eq!(*v, if *t { 200.0 } else { 0.0 });
        }
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let spec = PhantomSpec { dims: [24; 3], ..PhantomSpec::sphere(8.0) }.with_noise(20.0, 9);
        let (a, _) = make_phantom(&spec).unwrap();
        let (b, _) = make_phantom(&spec).unwrap();
        assert_eq!(a.data(), b.data());
        let (c, _) = make_phantom(&spec.with_noise(20.0, 10)).unwrap();
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn truth_volume_is_close_to_analytic() {
        for spec in [PhantomSpec::sphere(10.0), PhantomSpec::sphere(20.0), PhantomSpec::ellipsoid(25.0, 20.0, 15.0)] {
            let (_, truth) = make_phantom(&spec).unwrap();
            let got = super::super::mask_volume_cm3(&truth);
            let want = spec.analytic_volume_cm3();
            assert!((got - want).abs() / want < 0.02, "{got} vs {want}");
        }
    }

    #[test]
    fn oversized_objects_are_rejected() {
        assert!(make_phantom(&PhantomSpec::sphere(64.0)).is_err());
        let off_center = PhantomSpec { center: Some(WorldPoint::new(5.0, 60.0, 60.0)), ..PhantomSpec::sphere(10.0) };
        assert!(make_phantom(&off_center).is_err());
        assert!(make_phantom(&PhantomSpec::sphere(-1.0)).is_err());
    }
}
