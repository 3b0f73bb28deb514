//! Segments a batch of phantoms of varying size and noise and prints the
//! summary table comparing them with their ground truth.
//!
//! cargo run --release --example evaluate_batch -- [cases]

use spherecut::evalkit::{make_phantom, summarize, EvalCase, PhantomSpec};
use spherecut::graphbuild::SegmentationParams;
use spherecut::segmenter::segment;

fn main() -> spherecut::Result<()> {
    let cases: u64 = std::env::args().nth(1).map(|a| a.parse().expect("count")).unwrap_or(10);
    let mut results = Vec::new();
    for i in 0..cases {
        let r = 12.0 + 2.0 * i as f64;
        let spec = PhantomSpec::ellipsoid(r * 1.2, r, r * 0.8).with_noise(10.0 + 5.0 * i as f64, i);
        let (vol, truth) = make_phantom(&spec)?;
        let res = segment(&vol, vol.center(), &SegmentationParams::default())?;
        results.push(EvalCase::compare(format!("case{i:02}"), &res.mask, &truth)?);
    }
    let summary = summarize(&results)?;
    print!("{}", summary.render_table());
    Ok(())
}
