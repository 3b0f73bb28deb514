//! Scalar volumes, binary masks and the operations the pipeline needs on
//! them: voxel/world transforms, trilinear sampling, slice rendering and
//! file I/O (minimal NIfTI-1 and the native RVOL format).

mod nifti;
mod rvol;
mod slice;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, WorldPoint};

pub use slice::{extract_slice, Axis, SliceImage, Window};

/// Voxel grid geometry. Voxel `(0,0,0)` has its center at `origin`; index
/// `i` along an axis sits at `origin + i * spacing`. Storage is row-major
/// with x fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
}

impl Geometry {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidDims(dims.map(|d| d as i64)));
        }
        if spacing.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidVolume(format!(
                "spacing {spacing:?} must be finite and strictly positive"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidVolume(format!("origin {origin:?} is not finite")));
        }
        Ok(Self { dims, spacing, origin })
    }

    pub fn voxel_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Volume of one voxel in mm³.
    pub fn voxel_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    pub fn voxel_to_world(&self, ijk: [f64; 3]) -> WorldPoint {
        WorldPoint::new(
            self.origin[0] + ijk[0] * self.spacing[0],
            self.origin[1] + ijk[1] * self.spacing[1],
            self.origin[2] + ijk[2] * self.spacing[2],
        )
    }

    /// Continuous voxel coordinates of a world point.
    pub fn world_to_voxel(&self, p: WorldPoint) -> [f64; 3] {
        [
            (p.x - self.origin[0]) / self.spacing[0],
            (p.y - self.origin[1]) / self.spacing[1],
            (p.z - self.origin[2]) / self.spacing[2],
        ]
    }

    /// Whether `p` lies inside the bounding box of voxel centers.
    pub fn contains(&self, p: WorldPoint) -> bool {
        let c = self.world_to_voxel(p);
        (0..3).all(|a| c[a] >= -BOUNDS_EPS && c[a] <= (self.dims[a] - 1) as f64 + BOUNDS_EPS)
    }

    /// Index of the voxel whose center is nearest to `p`, if `p` is inside.
    pub fn nearest_voxel(&self, p: WorldPoint) -> Option<[usize; 3]> {
        if !self.contains(p) {
            return None;
        }
        let c = self.world_to_voxel(p);
        Some(std::array::from_fn(|a| {
            (c[a].round().max(0.0) as usize).min(self.dims[a] - 1)
        }))
    }

    /// World position of the volume center.
    pub fn center(&self) -> WorldPoint {
        self.voxel_to_world(self.dims.map(|d| (d - 1) as f64 / 2.0))
    }

    pub fn same_as(&self, other: &Geometry) -> bool {
        const TOL: f64 = 1e-9;
        self.dims == other.dims
            && (0..3).all(|a| {
                (self.spacing[a] - other.spacing[a]).abs() <= TOL * self.spacing[a].abs().max(1.0)
                    && (self.origin[a] - other.origin[a]).abs() <= TOL * self.origin[a].abs().max(1.0)
            })
    }

    pub(crate) fn check_same(&self, other: &Geometry) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!(
                "dims {:?}/{:?}, spacing {:?}/{:?}, origin {:?}/{:?}",
                self.dims, other.dims, self.spacing, other.spacing, self.origin, other.origin
            )))
        }
    }
}

// slack for world points computed on the exact boundary
const BOUNDS_EPS: f64 = 1e-9;

/// What trilinear sampling returns for points outside the voxel-center box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutOfBounds {
    /// A fixed value (0 by default).
    Value(f64),
    /// Interpolate at the nearest point of the voxel-center box.
    ClampToEdge,
}

impl Default for OutOfBounds {
    fn default() -> Self {
        OutOfBounds::Value(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub in_bounds: bool,
}

/// Scalar 3D image. Canonical storage is `f32`.
#[derive(Clone, Debug, PartialEq)]
pub struct Volume3D {
    geometry: Geometry,
    data: Vec<f32>,
}

impl Volume3D {
    pub fn new(geometry: Geometry, data: Vec<f32>) -> Result<Self> {
        if data.len() != geometry.voxel_count() {
            return Err(Error::InvalidVolume(format!(
                "data length {} does not match dims {:?}",
                data.len(),
                geometry.dims
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidVolume(format!("non-finite value at index {pos}")));
        }
        Ok(Self { geometry, data })
    }

    /// Volume filled by evaluating `f` at every voxel index.
    pub fn from_fn(geometry: Geometry, mut f: impl FnMut([usize; 3]) -> f32) -> Result<Self> {
        let data = (0..geometry.voxel_count()).map(|n| f(geometry.coords(n))).collect();
        Self::new(geometry, data)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.geometry.spacing
    }

    pub fn origin(&self) -> [f64; 3] {
        self.geometry.origin
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn center(&self) -> WorldPoint {
        self.geometry.center()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f32 {
        self.data[self.geometry.index(i, j, k)]
    }

    pub fn voxel_to_world(&self, ijk: [usize; 3]) -> WorldPoint {
        self.geometry.voxel_to_world(ijk.map(|v| v as f64))
    }

    pub fn world_to_voxel(&self, p: WorldPoint) -> [f64; 3] {
        self.geometry.world_to_voxel(p)
    }

    /// Minimum and maximum intensity.
    pub fn intensity_range(&self) -> (f32, f32) {
        self.data
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Trilinear sample with the default out-of-bounds value of 0.
    pub fn sample_trilinear(&self, p: WorldPoint) -> Sample {
        self.sample_with(p, OutOfBounds::default())
    }

    pub fn sample_with(&self, p: WorldPoint, oob: OutOfBounds) -> Sample {
        let c = self.geometry.world_to_voxel(p);
        let in_bounds = self.geometry.contains(p);
        if !in_bounds {
            match oob {
                OutOfBounds::Value(v) => return Sample { value: v, in_bounds },
                OutOfBounds::ClampToEdge => {}
            }
        }
        let dims = self.geometry.dims;
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        let mut t = [0.0f64; 3];
        for a in 0..3 {
            let n = dims[a];
            let ca = c[a].clamp(0.0, (n - 1) as f64);
            if n == 1 {
                continue;
            }
            let base = (ca.floor() as usize).min(n - 2);
            lo[a] = base;
            hi[a] = base + 1;
            t[a] = ca - base as f64;
        }
        let v = |i: usize, j: usize, k: usize| self.get(i, j, k) as f64;
        let lerp = |a: f64, b: f64, w: f64| a + (b - a) * w;
        let c00 = lerp(v(lo[0], lo[1], lo[2]), v(hi[0], lo[1], lo[2]), t[0]);
        let c10 = lerp(v(lo[0], hi[1], lo[2]), v(hi[0], hi[1], lo[2]), t[0]);
        let c01 = lerp(v(lo[0], lo[1], hi[2]), v(hi[0], lo[1], hi[2]), t[0]);
        let c11 = lerp(v(lo[0], hi[1], hi[2]), v(hi[0], hi[1], hi[2]), t[0]);
        let c0 = lerp(c00, c10, t[1]);
        let c1 = lerp(c01, c11, t[1]);
        Sample { value: lerp(c0, c1, t[2]), in_bounds }
    }
}

/// Binary mask on a voxel grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask3D {
    geometry: Geometry,
    data: Vec<bool>,
}

impl Mask3D {
    pub fn new(geometry: Geometry, data: Vec<bool>) -> Result<Self> {
        if data.len() != geometry.voxel_count() {
            return Err(Error::InvalidVolume(format!(
                "mask length {} does not match dims {:?}",
                data.len(),
                geometry.dims
            )));
        }
        Ok(Self { geometry, data })
    }

    pub fn empty(geometry: Geometry) -> Self {
        let n = geometry.voxel_count();
        Self { geometry, data: vec![false; n] }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.data[self.geometry.index(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: bool) {
        let n = self.geometry.index(i, j, k);
        self.data[n] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Fails unless `other` shares this mask's grid.
    pub fn check_paired(&self, other: &Geometry) -> Result<()> {
        self.geometry.check_same(other)
    }

    /// The mask as bytes, one `0`/`1` per voxel.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&b| b as u8).collect()
    }
}

/// On-disk scalar type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    I16,
    U16,
    F32,
    U8,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::I16 | Dtype::U16 => 2,
            Dtype::F32 => 4,
        }
    }

    fn decode(self, bytes: &[u8]) -> Vec<f64> {
        match self {
            Dtype::U8 => bytes.iter().map(|&b| b as f64).collect(),
            Dtype::I16 => bytes
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64)
                .collect(),
            Dtype::U16 => bytes
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]) as f64)
                .collect(),
            Dtype::F32 => bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Nifti,
    Rvol,
}

fn format_for_path(path: &Path) -> Result<Format> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    if name.ends_with(".nii") {
        Ok(Format::Nifti)
    } else if name.ends_with(".rvol") {
        Ok(Format::Rvol)
    } else {
        Err(Error::UnknownFormat(format!(
            "{}: expected a .nii or .rvol extension",
            path.display()
        )))
    }
}

/// Loads a NIfTI-1 or RVOL file, detected from its content.
pub fn load_volume(path: impl AsRef<Path>) -> Result<Volume3D> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Read { path: path.into(), source })?;
    decode_volume(&bytes)
}

/// Decodes an in-memory NIfTI-1 or RVOL file.
pub fn decode_volume(bytes: &[u8]) -> Result<Volume3D> {
    if bytes.first() == Some(&b'{') {
        rvol::decode(bytes)
    } else if nifti::looks_like_nifti(bytes) {
        nifti::decode(bytes)
    } else {
        Err(Error::UnknownFormat("neither an RVOL header nor a NIfTI-1 header".into()))
    }
}

/// Writes `vol` as float32, NIfTI-1 for `.nii` and RVOL for `.rvol`.
pub fn save_volume(vol: &Volume3D, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format_for_path(path)? {
        Format::Nifti => nifti::encode_f32(vol.geometry(), vol.data()),
        Format::Rvol => rvol::encode(vol.geometry(), Dtype::F32, &f32_bytes(vol.data())),
    };
    write_file(path, &bytes)
}

/// Loads a mask; every nonzero voxel is set.
pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask3D> {
    let vol = load_volume(path)?;
    let data = vol.data().iter().map(|&v| v != 0.0).collect();
    Mask3D::new(*vol.geometry(), data)
}

/// Writes `mask` as uint8 0/1, NIfTI-1 for `.nii` and RVOL for `.rvol`.
pub fn save_mask(mask: &Mask3D, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let payload = mask.to_bytes();
    let bytes = match format_for_path(path)? {
        Format::Nifti => nifti::encode_u8(mask.geometry(), &payload),
        Format::Rvol => rvol::encode(mask.geometry(), Dtype::U8, &payload),
    };
    write_file(path, &bytes)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Write { path: path.into(), source })
}

fn f32_bytes(data: &[f32]) -> Vec<u8> {
    data.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Builds a volume from decoded raw values, applying optional linear scaling.
fn finish_decode(geometry: Geometry, raw: Vec<f64>, slope: f64, inter: f64) -> Result<Volume3D> {
    let scaled = slope != 0.0 && slope.is_finite() && (slope != 1.0 || inter != 0.0);
    let data = raw
        .into_iter()
        .map(|v| if scaled { (v * slope + inter) as f32 } else { v as f32 })
        .collect();
    Volume3D::new(geometry, data)
}
