//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on
//! any failure. Run with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherecut::evalkit::{dice, make_phantom, mask_volume_cm3, summarize, EvalCase, PhantomSpec};
use spherecut::graphbuild::{is_smooth, CostTable, SegmentationParams};
use spherecut::maxflow::{brute_force_min_cut, max_flow, FlowNetwork};
use spherecut::segmenter::{enumerate_optimal_surface, segment, solve_surface};
use spherecut::spheremesh::{build_icosahedron, mesh_at_level, vertex_adjacency};
use spherecut::volume::{save_mask, Geometry, Mask3D};

const MESH_SERIES: [usize; 7] = [12, 32, 92, 272, 812, 2432, 7292];
const MESH_BUDGET: Duration = Duration::from_secs(1);
const DUALITY_CASES: usize = 250;
const DUALITY_MAX_NODES: usize = 12;
const DUALITY_BUDGET: Duration = Duration::from_secs(30);
const SURFACE_CASES_PER_DELTA: usize = 40;
const SURFACE_BUDGET: Duration = Duration::from_secs(60);
const SPHERE_RADIUS_MM: f64 = 20.0;
const SPHERE_VOLUME_CM3: f64 = 33.51;
const SPHERE_VOLUME_TOL: f64 = 0.02;
const MIN_DSC_CLEAN: f64 = 0.95;
const MIN_DSC_NOISY: f64 = 0.90;
// 10% of the 200/0 object-background contrast
const NOISE_SIGMA: f64 = 20.0;
const LEVEL5_BUDGET: Duration = Duration::from_secs(4);
const LEVEL6_BUDGET: Duration = Duration::from_secs(12);
const DSC_SYMMETRY_PAIRS: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn mesh_series() -> Outcome {
    let start = Instant::now();
    let counts: Vec<usize> = (0..=6).map(|k| mesh_at_level(k).unwrap().vertex_count()).collect();
    let elapsed = start.elapsed();
    check(
        counts == MESH_SERIES && elapsed < MESH_BUDGET,
        format!("counts {counts:?}, {:.0} ms (budget {} ms)", elapsed.as_secs_f64() * 1e3, MESH_BUDGET.as_millis()),
    )
}

fn random_network(rng: &mut ChaCha8Rng) -> FlowNetwork {
    let n = rng.random_range(1..=DUALITY_MAX_NODES);
    let mut net = FlowNetwork::new(n);
    for v in 0..n {
        net.add_source(v, rng.random_range(0..=9) as f64);
        net.add_sink(v, rng.random_range(0..=9) as f64);
    }
    for _ in 0..rng.random_range(0..=3 * n) {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            net.add_arc(u, v, rng.random_range(0..=9) as f64);
        }
    }
    net
}

fn min_cut_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..DUALITY_CASES {
        let net = random_network(&mut rng);
        let flow = max_flow(&net).flow_value;
        let (cut, _) = brute_force_min_cut(&net).unwrap();
        mismatches += (flow != cut) as usize;
    }
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && elapsed < DUALITY_BUDGET,
        format!(
            "{DUALITY_CASES} networks up to {DUALITY_MAX_NODES} nodes, {mismatches} mismatches, {:.2} s (budget {} s)",
            elapsed.as_secs_f64(),
            DUALITY_BUDGET.as_secs()
        ),
    )
}

fn surface_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xface);
    let adjacency = vertex_adjacency(&build_icosahedron());
    let start = Instant::now();
    let (mut wrong, mut rough, mut total) = (0, 0, 0);
    for delta in 0..=2 {
        for _ in 0..SURFACE_CASES_PER_DELTA {
            let costs = CostTable::new(12, 3, (0..36).map(|_| rng.random_range(0..=20) as f64).collect()).unwrap();
            let solution = solve_surface(&costs, &adjacency, delta).unwrap();
            let (best, _) = enumerate_optimal_surface(&costs, &adjacency, delta).unwrap();
            wrong += (solution.objective != best) as usize;
            rough += !is_smooth(&solution.boundary, &adjacency, delta) as usize;
            total += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        wrong == 0 && rough == 0 && elapsed < SURFACE_BUDGET,
        format!(
            "{total} instances (R=12, Z=3, delta 0..2), {wrong} suboptimal, {rough} non-smooth, {:.2} s (budget {} s)",
            elapsed.as_secs_f64(),
            SURFACE_BUDGET.as_secs()
        ),
    )
}

fn run_phantom(spec: &PhantomSpec, params: &SegmentationParams) -> (f64, f64, Duration) {
    let (vol, truth) = make_phantom(spec).unwrap();
    let start = Instant::now();
    let res = segment(&vol, vol.center(), params).unwrap();
    let elapsed = start.elapsed();
    (dice(&res.mask, &truth).unwrap(), mask_volume_cm3(&res.mask), elapsed)
}

fn phantom_fidelity() -> Outcome {
    let params = SegmentationParams::default();
    let (sphere_dsc, sphere_vol, _) = run_phantom(&PhantomSpec::sphere(SPHERE_RADIUS_MM), &params);
    let vol_err = (sphere_vol - SPHERE_VOLUME_CM3).abs() / SPHERE_VOLUME_CM3;
    let (ellipsoid_dsc, _, _) = run_phantom(&PhantomSpec::ellipsoid(25.0, 20.0, 15.0), &params);
    let (noisy_dsc, _, _) = run_phantom(&PhantomSpec::sphere(SPHERE_RADIUS_MM).with_noise(NOISE_SIGMA, 7), &params);
    check(
        sphere_dsc >= MIN_DSC_CLEAN
            && vol_err <= SPHERE_VOLUME_TOL
            && ellipsoid_dsc >= MIN_DSC_CLEAN
            && noisy_dsc >= MIN_DSC_NOISY,
        format!(
            "sphere DSC {sphere_dsc:.4} (>= {MIN_DSC_CLEAN}), volume {sphere_vol:.3} cm^3 ({:.2}% off {SPHERE_VOLUME_CM3}, tol {:.0}%); \
             ellipsoid 25x20x15 DSC {ellipsoid_dsc:.4} (>= {MIN_DSC_CLEAN}); noisy sigma {NOISE_SIGMA} DSC {noisy_dsc:.4} (>= {MIN_DSC_NOISY})",
            100.0 * vol_err,
            100.0 * SPHERE_VOLUME_TOL
        ),
    )
}

fn runtime() -> Outcome {
    let spec = PhantomSpec::sphere(SPHERE_RADIUS_MM);
    let (_, _, t5) = run_phantom(&spec, &SegmentationParams::default());
    let (_, _, t6) = run_phantom(&spec, &SegmentationParams { mesh_level: 6, ..Default::default() });
    check(
        t5 < LEVEL5_BUDGET && t6 < LEVEL6_BUDGET,
        format!(
            "level 5 (R=2432, Z=50) {:.0} ms (budget {} ms); level 6 (R=7292) {:.0} ms (budget {} ms)",
            t5.as_secs_f64() * 1e3,
            LEVEL5_BUDGET.as_millis(),
            t6.as_secs_f64() * 1e3,
            LEVEL6_BUDGET.as_millis()
        ),
    )
}

fn mask_from(g: Geometry, on: &[usize]) -> Mask3D {
    let mut data = vec![false; g.voxel_count()];
    for &i in on {
        data[i] = true;
    }
    Mask3D::new(g, data).unwrap()
}

fn dsc_suite() -> Outcome {
    let g = Geometry::new([8, 8, 8], [1.0; 3], [0.0; 3]).unwrap();
    let a = mask_from(g, &[3, 4, 5, 100]);
    let identity = dice(&a, &a).unwrap();
    let disjoint = dice(&a, &mask_from(g, &[0, 1, 2])).unwrap();
    let hand = dice(&mask_from(g, &[10, 11]), &mask_from(g, &[10, 11, 12])).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ce);
    let mut asymmetric = 0;
    for _ in 0..DSC_SYMMETRY_PAIRS {
        let p = rng.random_range(0.05..0.95);
        let x = Mask3D::new(g, (0..512).map(|_| rng.random_bool(p)).collect()).unwrap();
        let y = Mask3D::new(g, (0..512).map(|_| rng.random_bool(p)).collect()).unwrap();
        asymmetric += (dice(&x, &y).unwrap() != dice(&y, &x).unwrap()) as usize;
    }
    check(
        identity == 1.0 && disjoint == 0.0 && hand == 0.8 && asymmetric == 0,
        format!(
            "identity {identity}, disjoint {disjoint}, 2-of-3 overlap {hand} (exact 0.8), \
             {asymmetric}/{DSC_SYMMETRY_PAIRS} asymmetric pairs"
        ),
    )
}

fn determinism() -> Outcome {
    let spec = PhantomSpec::sphere(SPHERE_RADIUS_MM).with_noise(NOISE_SIGMA, 3);
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    let mut reports = Vec::new();
    for run in 0..2 {
        // regenerate the phantom too: the whole chain must be reproducible
        let (vol, _) = make_phantom(&spec).unwrap();
        let res = segment(&vol, vol.center(), &SegmentationParams::default()).unwrap();
        let path = dir.path().join(format!("mask{run}.nii"));
        save_mask(&res.mask, &path).unwrap();
        files.push(std::fs::read(&path).unwrap());
        reports.push(res.report().to_json(false));
    }
    check(
        files[0] == files[1] && reports[0] == reports[1],
        format!(
            "mask files {} bytes, identical: {}; reports (timings excluded) identical: {}",
            files[0].len(),
            files[0] == files[1],
            reports[0] == reports[1]
        ),
    )
}

fn report_layout() -> Outcome {
    // hand-chosen DSC, volumes and counts for ten cases
    let dsc = [0.7107, 0.8467, 0.7712, 0.7545, 0.8020, 0.7390, 0.7933, 0.7801, 0.7499, 0.8015];
    let vol_ref = [0.84, 15.57, 6.1, 3.2, 9.9, 4.4, 2.5, 7.3, 5.6, 7.6];
    let cases: Vec<EvalCase> = (0..10)
        .map(|i| EvalCase {
            id: format!("case{i}"),
            dsc: dsc[i],
            vol_ref_cm3: vol_ref[i],
            vol_auto_cm3: vol_ref[i] * 0.97,
            voxels_ref: (vol_ref[i] * 1000.0).round() as usize,
            voxels_auto: (vol_ref[i] * 970.0).round() as usize,
            manual_time_min: None,
        })
        .collect();
    let table = summarize(&cases).unwrap().render_table();

    // independent recomputation
    let stats = |xs: &[f64]| {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
        let min = xs.iter().cloned().fold(f64::MAX, f64::min);
        let max = xs.iter().cloned().fold(f64::MIN, f64::max);
        (min, max, mean, sd)
    };
    let columns: [(Vec<f64>, usize); 5] = [
        (cases.iter().map(|c| c.vol_ref_cm3).collect(), 2),
        (cases.iter().map(|c| c.vol_auto_cm3).collect(), 2),
        (cases.iter().map(|c| c.voxels_ref as f64).collect(), 0),
        (cases.iter().map(|c| c.voxels_auto as f64).collect(), 0),
        (cases.iter().map(|c| c.dsc * 100.0).collect(), 2),
    ];
    let row = |label: &str| table.lines().find(|l| l.starts_with(label)).map(str::to_string);
    let (Some(min_row), Some(max_row), Some(mean_row)) = (row("min"), row("max"), row("mean ± sd")) else {
        return check(false, format!("missing rows in\n{table}"));
    };
    let mut expected_min = Vec::new();
    let mut expected_max = Vec::new();
    let mut expected_mean = Vec::new();
    for (values, d) in &columns {
        let (min, max, mean, sd) = stats(values);
        expected_min.push(format!("{min:.d$}"));
        expected_max.push(format!("{max:.d$}"));
        let dm = (*d).max(1);
        expected_mean.push(format!("{mean:.dm$} ± {sd:.dm$}"));
    }
    let cells = |line: &str, label: &str| -> Vec<String> {
        line[label.len()..].split("  ").map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
    };
    let ok = cells(&min_row, "min") == expected_min
        && cells(&max_row, "max") == expected_max
        && cells(&mean_row, "mean ± sd") == expected_mean
        && table.contains("Volume (cm^3)")
        && table.contains("Number of voxels")
        && table.contains("DSC (%)");
    check(
        ok,
        format!("10 cases; min {:?}; max {:?}; mean ± sd {:?}", cells(&min_row, "min"), cells(&max_row, "max"), cells(&mean_row, "mean ± sd")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("mesh series", mesh_series),
        ("min-cut duality", min_cut_duality),
        ("surface optimality", surface_optimality),
        ("phantom fidelity", phantom_fidelity),
        ("runtime", runtime),
        ("dsc unit suite", dsc_suite),
        ("determinism", determinism),
        ("report layout", report_layout),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        println!("{} {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        failed += !outcome.pass as usize;
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
