use proptest::prelude::*;
use spherecut::volume::{load_mask, load_volume, save_mask, save_volume, Geometry, Mask3D, Volume3D};
use spherecut::WorldPoint;

/// NIfTI stores spacing and origin as f32, so generated geometry is
/// rounded to f32 to make exact round trips meaningful.
fn geometry() -> impl Strategy<Value = Geometry> {
    (
        prop::array::uniform3(1usize..7),
        prop::array::uniform3(0.25f64..3.0),
        prop::array::uniform3(-50.0f64..50.0),
    )
        .prop_map(|(d, s, o)| {
            let f32_exact = |v: [f64; 3]| v.map(|x| x as f32 as f64);
            Geometry::new(d, f32_exact(s), f32_exact(o)).unwrap()
        })
}

fn volume() -> impl Strategy<Value = Volume3D> {
    geometry().prop_flat_map(|g| {
        prop::collection::vec(-1e4f32..1e4, g.voxel_count()).prop_map(move |data| Volume3D::new(g, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn volume_round_trips_through_both_formats(vol in volume(), rvol in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(if rvol { "v.rvol" } else { "v.nii" });
        save_volume(&vol, &path).unwrap();
        let back = load_volume(&path).unwrap();
        prop_assert_eq!(back.dims(), vol.dims());
        prop_assert!(back.geometry().same_as(vol.geometry()));
        prop_assert_eq!(back.data(), vol.data());
    }

    #[test]
    fn mask_round_trips(g in geometry(), seed in any::<u64>(), rvol in any::<bool>()) {
        let data = (0..g.voxel_count()).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
        let mask = Mask3D::new(g, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(if rvol { "m.rvol" } else { "m.nii" });
        save_mask(&mask, &path).unwrap();
        prop_assert_eq!(load_mask(&path).unwrap(), mask);
    }

    #[test]
    fn voxel_world_transform_inverts(g in geometry(), ijk in prop::array::uniform3(-10.0f64..10.0)) {
        let back = g.world_to_voxel(g.voxel_to_world(ijk));
        for a in 0..3 {
            prop_assert!((back[a] - ijk[a]).abs() < 1e-9);
        }
    }

    #[test]
    fn trilinear_is_exact_on_affine_fields(
        coef in prop::array::uniform4(-5.0f64..5.0),
        frac in prop::array::uniform3(0.0f64..1.0),
    ) {
        let g = Geometry::new([6, 5, 4], [1.5, 0.5, 2.0], [3.0, -2.0, 1.0]).unwrap();
        let field = |p: WorldPoint| coef[0] + coef[1] * p.x + coef[2] * p.y + coef[3] * p.z;
        let vol = Volume3D::from_fn(g, |ijk| field(g.voxel_to_world(ijk.map(|c| c as f64))) as f32).unwrap();
        let p = g.voxel_to_world([frac[0] * 5.0, frac[1] * 4.0, frac[2] * 3.0]);
        let s = vol.sample_trilinear(p);
        prop_assert!(s.in_bounds);
        // f32 storage limits the agreement
        prop_assert!((s.value - field(p)).abs() < 1e-4 * (1.0 + field(p).abs()));
    }

    #[test]
    fn sampling_never_returns_nan(p in prop::array::uniform3(-100.0f64..100.0)) {
        let g = Geometry::new([4, 4, 4], [1.0; 3], [0.0; 3]).unwrap();
        let vol = Volume3D::from_fn(g, |[i, j, k]| (i * j + k) as f32).unwrap();
        prop_assert!(!vol.sample_trilinear(WorldPoint::from(p)).value.is_nan());
    }
}

#[test]
fn unknown_extension_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let g = Geometry::new([2, 2, 2], [1.0; 3], [0.0; 3]).unwrap();
    let vol = Volume3D::new(g, vec![0.0; 8]).unwrap();
    assert!(save_volume(&vol, dir.path().join("v.raw")).is_err());
    assert!(load_volume(dir.path().join("missing.nii")).is_err());
}
