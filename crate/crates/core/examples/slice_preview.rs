//! Writes one windowed slice of a volume as a binary PGM image.
//!
//! cargo run --example slice_preview -- volume.nii axial 64 out.pgm [center width]

use spherecut::evalkit::{make_phantom, PhantomSpec};
use spherecut::volume::{extract_slice, load_volume, Axis, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let vol = match args.first() {
        Some(path) => load_volume(path)?,
        None => make_phantom(&PhantomSpec::sphere(20.0).with_noise(30.0, 3))?.0,
    };
    let axis = match args.get(1).map(String::as_str).unwrap_or("axial") {
        "sagittal" => Axis::Sagittal,
        "coronal" => Axis::Coronal,
        _ => Axis::Axial,
    };
    let index = args.get(2).map(|a| a.parse().expect("index")).unwrap_or(vol.dims()[2] / 2);
    let out = args.get(3).cloned().unwrap_or_else(|| "slice.pgm".into());
    let (lo, hi) = vol.intensity_range();
    let window = Window {
        center: args.get(4).map(|a| a.parse().expect("center")).unwrap_or((lo + hi) as f64 / 2.0),
        width: args.get(5).map(|a| a.parse().expect("width")).unwrap_or(((hi - lo) as f64).max(1.0)),
    };

    let img = extract_slice(&vol, axis, index, window)?;
    let mut pgm = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    pgm.extend_from_slice(&img.pixels);
    std::fs::write(&out, pgm)?;
    println!("{}x{} slice written to {out}", img.width, img.height);
    Ok(())
}
