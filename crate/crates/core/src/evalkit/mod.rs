//! Evaluation: Dice overlap, mask volumes, synthetic phantoms with ground
//! truth, and min/max/mean ± sd summary tables.

mod phantom;
mod summary;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::volume::{load_mask, Mask3D};
use crate::{Error, Result};

pub use phantom::{make_phantom, PhantomShape, PhantomSpec};
pub use summary::{summarize, Stat, SummaryReport};

/// Dice similarity `2 |A ∩ R| / (|A| + |R|)`.
///
/// Volumes are voxel counts times the voxel volume; on a shared grid the
/// voxel volume cancels, so the ratio is computed from counts.
pub fn dice(a: &Mask3D, r: &Mask3D) -> Result<f64> {
    a.check_paired(r.geometry())?;
    let (mut both, mut na, mut nr) = (0usize, 0usize, 0usize);
    for (&x, &y) in a.data().iter().zip(r.data()) {
        na += x as usize;
        nr += y as usize;
        both += (x && y) as usize;
    }
    if na + nr == 0 {
        return Err(Error::EmptyMasks);
    }
    Ok(2.0 * both as f64 / (na + nr) as f64)
}

/// Mask volume in cm³.
pub fn mask_volume_cm3(mask: &Mask3D) -> f64 {
    mask.count() as f64 * mask.geometry().voxel_volume() / 1000.0
}

/// Comparison of one automatic mask with its reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalCase {
    pub id: String,
    /// Fraction in `[0, 1]`.
    pub dsc: f64,
    pub vol_auto_cm3: f64,
    pub vol_ref_cm3: f64,
    pub voxels_auto: usize,
    pub voxels_ref: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manual_time_min: Option<f64>,
}

impl EvalCase {
    pub fn compare(id: impl Into<String>, auto: &Mask3D, reference: &Mask3D) -> Result<Self> {
        Ok(Self {
            id: id.into(),
            dsc: dice(auto, reference)?,
            vol_auto_cm3: mask_volume_cm3(auto),
            vol_ref_cm3: mask_volume_cm3(reference),
            voxels_auto: auto.count(),
            voxels_ref: reference.count(),
            manual_time_min: None,
        })
    }
}

/// One line of an evaluation manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub auto: PathBuf,
    #[serde(rename = "ref")]
    pub reference: PathBuf,
    #[serde(default)]
    pub manual_time_min: Option<f64>,
}

/// Reads a JSON list of `{id, auto, ref}` entries. Relative paths are
/// resolved against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
    let mut entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for e in &mut entries {
        e.auto = base.join(&e.auto);
        e.reference = base.join(&e.reference);
    }
    Ok(entries)
}

/// Loads and compares every manifest entry. Errors name the failing case.
pub fn evaluate_manifest(entries: &[ManifestEntry]) -> Result<Vec<EvalCase>> {
    entries
        .iter()
        .map(|e| {
            let auto = load_mask(&e.auto)?;
            let reference = load_mask(&e.reference)?;
            let mut case = EvalCase::compare(&e.id, &auto, &reference).map_err(|err| match err {
                Error::GeometryMismatch(msg) => Error::GeometryMismatch(format!("case {}: {msg}", e.id)),
                Error::EmptyMasks => Error::InvalidVolume(format!("case {}: both masks are empty", e.id)),
                other => other,
            })?;
            case.manual_time_min = e.manual_time_min;
            Ok(case)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Geometry;

    fn mask(dims: [usize; 3], spacing: f64, on: &[usize]) -> Mask3D {
        let g = Geometry::new(dims, [spacing; 3], [0.0; 3]).unwrap();
        let mut data = vec![false; g.voxel_count()];
        for &i in on {
            data[i] = true;
        }
        Mask3D::new(g, data).unwrap()
    }

    #[test]
    fn dice_examples() {
        let a = mask([4, 4, 4], 1.0, &[0, 1]);
        let r = mask([4, 4, 4], 1.0, &[0, 1, 2]);
        assert_eq!(dice(&a, &r).unwrap(), 0.8);
        assert_eq!(dice(&r, &r).unwrap(), 1.0);
        assert_eq!(dice(&a, &mask([4, 4, 4], 1.0, &[5, 9])).unwrap(), 0.0);
    }

    #[test]
    fn dice_errors() {
        let a = mask([4, 4, 4], 1.0, &[0]);
        assert!(matches!(dice(&a, &mask([4, 4, 5], 1.0, &[0])), Err(Error::GeometryMismatch(_))));
        let e = mask([4, 4, 4], 1.0, &[]);
        assert!(matches!(dice(&e, &e), Err(Error::EmptyMasks)));
    }

    #[test]
    fn volume_in_cubic_centimetres() {
        assert_eq!(mask_volume_cm3(&mask([10, 10, 10], 1.0, &(0..1000).collect::<Vec<_>>())), 1.0);
        assert_eq!(mask_volume_cm3(&mask([10, 10, 10], 1.0, &[])), 0.0);
        assert_eq!(mask_volume_cm3(&mask([4, 4, 4], 2.0, &[0, 1])), 0.016);
    }

    #[test]
    fn eval_case_fields() {
        let a = mask([4, 4, 4], 1.0, &[0, 1]);
        let r = mask([4, 4, 4], 1.0, &[0, 1, 2]);
        let c = EvalCase::compare("x", &a, &r).unwrap();
        assert_eq!((c.voxels_auto, c.voxels_ref), (2, 3));
        assert_eq!(c.vol_ref_cm3, 0.003);
    }
}
