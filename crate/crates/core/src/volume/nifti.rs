//! Minimal NIfTI-1 support: single-file `.nii`, little-endian, axis-aligned
//! geometry, uint8/int16/uint16/float32 payloads.

use super::{finish_decode, Dtype, Geometry, Volume3D};
use crate::{Error, Result};

const HEADER_SIZE: usize = 348;
const DATA_OFFSET: usize = 352;
const MAGIC: &[u8; 4] = b"n+1\0";

const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_FLOAT32: i16 = 16;
const DT_UINT16: i16 = 512;

const NIFTI_UNITS_MM: u8 = 2;

pub(super) fn looks_like_nifti(bytes: &[u8]) -> bool {
    bytes.len() >= 4 && (read_i32(bytes, 0) == HEADER_SIZE as i32 || i32::from_be_bytes(bytes[..4].try_into().unwrap()) == HEADER_SIZE as i32)
}

fn read_i16(b: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([b[off], b[off + 1]])
}

fn read_i32(b: &[u8], off: usize) -> i32 {
    i32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

fn read_f32(b: &[u8], off: usize) -> f64 {
    f32::from_le_bytes(b[off..off + 4].try_into().unwrap()) as f64
}

pub(super) fn decode(bytes: &[u8]) -> Result<Volume3D> {
    if bytes.len() < HEADER_SIZE {
        return Err(Error::UnsupportedHeader(format!(
            "file is {} bytes, shorter than the {HEADER_SIZE}-byte header",
            bytes.len()
        )));
    }
    if read_i32(bytes, 0) != HEADER_SIZE as i32 {
        return Err(Error::UnsupportedHeader("big-endian NIfTI is not supported".into()));
    }
    if &bytes[344..348] != MAGIC {
        return Err(Error::UnsupportedHeader(
            "magic is not \"n+1\\0\" (only single-file NIfTI-1 is supported)".into(),
        ));
    }

    let dtype = match read_i16(bytes, 70) {
        DT_UINT8 => Dtype::U8,
        DT_INT16 => Dtype::I16,
        DT_UINT16 => Dtype::U16,
        DT_FLOAT32 => Dtype::F32,
        other => return Err(Error::UnsupportedDatatype(format!("NIfTI datatype code {other}"))),
    };

    let dim: [i64; 8] = std::array::from_fn(|n| read_i16(bytes, 40 + 2 * n) as i64);
    let raw_dims = [dim[1], dim[2], dim[3]];
    if !(1..=7).contains(&dim[0]) || raw_dims.iter().any(|&d| d <= 0) {
        return Err(Error::InvalidDims(raw_dims));
    }
    if dim[0] > 3 && dim[4..=dim[0] as usize].iter().any(|&d| d != 1) {
        return Err(Error::UnsupportedHeader(format!("{}D volumes are not supported", dim[0])));
    }

    let pixdim: [f64; 8] = std::array::from_fn(|n| read_f32(bytes, 76 + 4 * n));
    if pixdim[0] < 0.0 {
        return Err(Error::UnsupportedHeader("negative qfac (flipped z axis)".into()));
    }
    let spacing = [pixdim[1], pixdim[2], pixdim[3]];

    let qform_code = read_i16(bytes, 252);
    let sform_code = read_i16(bytes, 254);
    let origin = if qform_code > 0 {
        let quat = [read_f32(bytes, 256), read_f32(bytes, 260), read_f32(bytes, 264)];
        if quat.iter().any(|q| q.abs() > 1e-6) {
            return Err(Error::UnsupportedHeader(format!(
                "rotated qform (quaternion b,c,d = {quat:?})"
            )));
        }
        [read_f32(bytes, 268), read_f32(bytes, 272), read_f32(bytes, 276)]
    } else if sform_code > 0 {
        let row = |r: usize| -> [f64; 4] { std::array::from_fn(|c| read_f32(bytes, 280 + 16 * r + 4 * c)) };
        let rows = [row(0), row(1), row(2)];
        for (r, values) in rows.iter().enumerate() {
            for (c, v) in values.iter().take(3).enumerate() {
                if r != c && v.abs() > 1e-6 {
                    return Err(Error::UnsupportedHeader("sheared or rotated sform".into()));
                }
            }
        }
        [rows[0][3], rows[1][3], rows[2][3]]
    } else {
        [0.0; 3]
    };

    let dims = raw_dims.map(|d| d as usize);
    let geometry = Geometry::new(dims, spacing, origin)?;

    let vox_offset = read_f32(bytes, 108);
    if !(vox_offset.is_finite() && vox_offset >= HEADER_SIZE as f64) {
        return Err(Error::UnsupportedHeader(format!("vox_offset {vox_offset}")));
    }
    let start = vox_offset as usize;
    let expected = geometry.voxel_count() * dtype.size();
    let found = bytes.len().saturating_sub(start);
    if found != expected {
        return Err(Error::PayloadSizeMismatch { expected, found });
    }

    let raw = dtype.decode(&bytes[start..]);
    finish_decode(geometry, raw, read_f32(bytes, 112), read_f32(bytes, 116))
}

fn header(geometry: &Geometry, datatype: i16, bitpix: i16) -> Vec<u8> {
    let mut h = vec![0u8; DATA_OFFSET];
    let put_i16 = |h: &mut [u8], off: usize, v: i16| h[off..off + 2].copy_from_slice(&v.to_le_bytes());
    let put_f32 = |h: &mut [u8], off: usize, v: f64| h[off..off + 4].copy_from_slice(&(v as f32).to_le_bytes());

    h[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    let dims = geometry.dims;
    let dim: [i16; 8] = [3, dims[0] as i16, dims[1] as i16, dims[2] as i16, 1, 1, 1, 1];
    for (n, d) in dim.iter().enumerate() {
        put_i16(&mut h, 40 + 2 * n, *d);
    }
    put_i16(&mut h, 70, datatype);
    put_i16(&mut h, 72, bitpix);
    let pixdim = [1.0, geometry.spacing[0], geometry.spacing[1], geometry.spacing[2], 1.0, 1.0, 1.0, 1.0];
    for (n, p) in pixdim.iter().enumerate() {
        put_f32(&mut h, 76 + 4 * n, *p);
    }
    put_f32(&mut h, 108, DATA_OFFSET as f64);
    put_f32(&mut h, 112, 1.0);
    put_f32(&mut h, 116, 0.0);
    h[123] = NIFTI_UNITS_MM;
    put_i16(&mut h, 252, 1);
    put_i16(&mut h, 254, 1);
    for a in 0..3 {
        put_f32(&mut h, 268 + 4 * a, geometry.origin[a]);
        put_f32(&mut h, 280 + 16 * a + 4 * a, geometry.spacing[a]);
        put_f32(&mut h, 280 + 16 * a + 12, geometry.origin[a]);
    }
    h[344..348].copy_from_slice(MAGIC);
    h
}

pub(super) fn encode_f32(geometry: &Geometry, data: &[f32]) -> Vec<u8> {
    let mut out = header(geometry, DT_FLOAT32, 32);
    out.extend(data.iter().flat_map(|v| v.to_le_bytes()));
    out
}

pub(super) fn encode_u8(geometry: &Geometry, data: &[u8]) -> Vec<u8> {
    let mut out = header(geometry, DT_UINT8, 8);
    out.extend_from_slice(data);
    out
}
