//! Run-length transport for masks.
//!
//! A mask in storage order (x fastest) becomes alternating run lengths,
//! starting with a run of unset voxels that may be zero.

/// Encodes a flat boolean array.
pub fn encode(data: &[bool]) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    for &v in data {
        if v == current {
            len += 1;
        } else {
            runs.push(len);
            current = v;
            len = 1;
        }
    }
    if len > 0 || runs.is_empty() {
        runs.push(len);
    }
    runs
}

#[derive(Debug, PartialEq, Eq)]
pub struct LengthMismatch {
    pub expected: usize,
    pub found: u64,
}

/// Decodes runs back into `expected` voxels.
pub fn decode(runs: &[u64], expected: usize) -> Result<Vec<bool>, LengthMismatch> {
    let total: u64 = runs.iter().sum();
    if total != expected as u64 {
        return Err(LengthMismatch { expected, found: total });
    }
    let mut out = Vec::with_capacity(expected);
    for (i, &len) in runs.iter().enumerate() {
        out.extend(std::iter::repeat_n(i % 2 == 1, len as usize));
    }
    Ok(out)
}
