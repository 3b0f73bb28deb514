//! Segments a noisy ellipsoid with increasing smoothness limits and shows
//! how the optimum and the overlap with the truth move.
//!
//! cargo run --release --example smoothness_sweep

use spherecut::evalkit::{dice, make_phantom, PhantomSpec};
use spherecut::graphbuild::SegmentationParams;
use spherecut::segmenter::segment;

fn main() -> spherecut::Result<()> {
    let spec = PhantomSpec::ellipsoid(25.0, 20.0, 15.0).with_noise(40.0, 7);
    let (vol, truth) = make_phantom(&spec)?;
    println!("{:>7} {:>12} {:>8} {:>10}", "delta_r", "objective", "dice", "time (ms)");
    for delta_r in [0, 1, 2, 3, 5, 8] {
        let params = SegmentationParams { delta_r, ..Default::default() };
        let res = segment(&vol, vol.center(), &params)?;
        println!(
            "{delta_r:>7} {:>12.2} {:>8.4} {:>10.1}",
            res.objective,
            dice(&res.mask, &truth)?,
            res.timings.total
        );
    }
    Ok(())
}
