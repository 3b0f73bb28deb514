use serde::{Deserialize, Serialize};

use super::{SegmentationResult, Timings};
use crate::evalkit::mask_volume_cm3;
use crate::graphbuild::SegmentationParams;
use crate::WorldPoint;

/// JSON sidecar written next to a segmentation mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationReport {
    pub seed: WorldPoint,
    pub params: SegmentationParams,
    pub rays: usize,
    pub seed_mean: f64,
    pub objective: f64,
    pub voxel_count: usize,
    pub volume_cm3: f64,
    pub timings_ms: Timings,
    pub warnings: Vec<String>,
}

impl SegmentationReport {
    pub fn from_result(res: &SegmentationResult) -> Self {
        Self {
            seed: res.seed,
            params: res.params,
            rays: res.boundary_index.len(),
            seed_mean: res.seed_mean,
            objective: res.objective,
            voxel_count: res.mask.count(),
            volume_cm3: mask_volume_cm3(&res.mask),
            timings_ms: res.timings,
            warnings: res.warnings.clone(),
        }
    }

    /// Pretty JSON. Timings differ between runs; drop them to compare
    /// reports byte for byte.
    pub fn to_json(&self, with_timings: bool) -> String {
        let mut value = serde_json::to_value(self).expect("report is serializable");
        if !with_timings {
            value.as_object_mut().expect("object").remove("timings_ms");
        }
        let mut s = serde_json::to_string_pretty(&value).expect("report is serializable");
        s.push('\n');
        s
    }
}
