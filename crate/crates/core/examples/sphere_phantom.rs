//! Segments the default sphere phantom and prints overlap, volume and timings.
//!
//! cargo run --release --example sphere_phantom -- [radius_mm] [noise_sigma]

use spherecut::evalkit::{dice, make_phantom, mask_volume_cm3, PhantomSpec};
use spherecut::graphbuild::SegmentationParams;
use spherecut::segmenter::segment;

fn main() -> spherecut::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let radius = args.next().unwrap_or(20.0);
    let sigma = args.next().unwrap_or(0.0);

    let spec = PhantomSpec::sphere(radius).with_noise(sigma, 1);
    let (vol, truth) = make_phantom(&spec)?;
    let res = segment(&vol, vol.center(), &SegmentationParams::default())?;

    println!("rays            {}", res.boundary_index.len());
    println!("objective       {:.3}", res.objective);
    println!("dice            {:.4}", dice(&res.mask, &truth)?);
    println!("volume          {:.3} cm^3 (truth {:.3}, analytic {:.3})",
        mask_volume_cm3(&res.mask), mask_volume_cm3(&truth), spec.analytic_volume_cm3());
    println!("timings (ms)    {}", serde_json::to_string(&res.timings).unwrap());
    Ok(())
}
