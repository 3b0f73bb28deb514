use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Volume3D;
use crate::{Error, Result};

/// Slice orientation. Axial planes have fixed z, sagittal fixed x,
/// coronal fixed y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Axial,
    Sagittal,
    Coronal,
}

impl Axis {
    /// The volume axis held fixed, followed by the column and row axes of
    /// the resulting image.
    pub fn layout(self) -> (usize, usize, usize) {
        match self {
            Axis::Axial => (2, 0, 1),
            Axis::Sagittal => (0, 1, 2),
            Axis::Coronal => (1, 0, 2),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "axial" => Ok(Axis::Axial),
            "sagittal" => Ok(Axis::Sagittal),
            "coronal" => Ok(Axis::Coronal),
            _ => Err(Error::InvalidParams(format!("unknown axis {s:?}"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Axial => "axial",
            Axis::Sagittal => "sagittal",
            Axis::Coronal => "coronal",
        })
    }
}

/// Linear display window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: f64,
    pub width: f64,
}

impl Window {
    /// Maps `value` to 0..=255; `center - width/2` goes to 0 and
    /// `center + width/2` to 255, rounding half up.
    #[inline]
    pub fn map(&self, value: f64) -> u8 {
        let lo = self.center - self.width / 2.0;
        let scaled = ((value - lo) / self.width * 255.0).clamp(0.0, 255.0);
        (scaled + 0.5).floor() as u8
    }
}

/// 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl SliceImage {
    pub fn pixel(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

/// Renders plane `index` along `axis` through `window`.
pub fn extract_slice(vol: &Volume3D, axis: Axis, index: usize, window: Window) -> Result<SliceImage> {
    if !(window.width.is_finite() && window.width > 0.0 && window.center.is_finite()) {
        return Err(Error::InvalidParams(format!("window width {} must be positive", window.width)));
    }
    let dims = vol.dims();
    let (fixed, col_axis, row_axis) = axis.layout();
    if index >= dims[fixed] {
        return Err(Error::IndexOutOfRange { index, extent: dims[fixed] });
    }
    let (width, height) = (dims[col_axis], dims[row_axis]);
    let mut pixels = Vec::with_capacity(width * height);
    let mut ijk = [0usize; 3];
    ijk[fixed] = index;
    for row in 0..height {
        ijk[row_axis] = row;
        for col in 0..width {
            ijk[col_axis] = col;
            pixels.push(window.map(vol.get(ijk[0], ijk[1], ijk[2]) as f64));
        }
    }
    Ok(SliceImage { width, height, pixels })
}
