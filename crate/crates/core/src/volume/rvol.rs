//! RVOL: one UTF-8 JSON header line followed by a raw little-endian,
//! x-fastest payload.

use serde::{Deserialize, Serialize};

use super::{finish_decode, Dtype, Geometry, Volume3D};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Header<T> {
    dims: [i64; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    dtype: T,
}

pub(super) fn decode(bytes: &[u8]) -> Result<Volume3D> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::UnknownFormat("RVOL header is not terminated by a newline".into()))?;
    let header: Header<String> = serde_json::from_slice(&bytes[..newline])?;
    let dtype = match header.dtype.as_str() {
        "i16" => Dtype::I16,
        "u16" => Dtype::U16,
        "f32" => Dtype::F32,
        "u8" => Dtype::U8,
        other => return Err(Error::UnsupportedDatatype(format!("RVOL dtype {other:?}"))),
    };
    if header.dims.iter().any(|&d| d <= 0) {
        return Err(Error::InvalidDims(header.dims));
    }
    let geometry = Geometry::new(header.dims.map(|d| d as usize), header.spacing, header.origin)?;
    let payload = &bytes[newline + 1..];
    let expected = geometry.voxel_count() * dtype.size();
    if payload.len() != expected {
        return Err(Error::PayloadSizeMismatch { expected, found: payload.len() });
    }
    finish_decode(geometry, dtype.decode(payload), 1.0, 0.0)
}

pub(super) fn encode(geometry: &Geometry, dtype: Dtype, payload: &[u8]) -> Vec<u8> {
    let header = Header {
        dims: geometry.dims.map(|d| d as i64),
        spacing: geometry.spacing,
        origin: geometry.origin,
        dtype,
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.extend_from_slice(payload);
    out
}
