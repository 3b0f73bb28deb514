use std::fmt::Write as _;

use serde::Serialize;

use super::EvalCase;
use crate::{Error, Result};

/// Min, max, mean and population standard deviation (divisor `n`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stat {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("no values to summarize"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Ok(Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std: var.sqrt(),
        })
    }
}

/// Per-metric statistics over a batch of cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryReport {
    pub cases: Vec<EvalCase>,
    pub vol_ref_cm3: Stat,
    pub vol_auto_cm3: Stat,
    pub voxels_ref: Stat,
    pub voxels_auto: Stat,
    /// Dice in percent.
    pub dsc_percent: Stat,
    /// Present only when every case carries a manual time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manual_time_min: Option<Stat>,
}

pub fn summarize(cases: &[EvalCase]) -> Result<SummaryReport> {
    if cases.is_empty() {
        return Err(Error::Empty("no cases to summarize"));
    }
    let col = |f: fn(&EvalCase) -> f64| Stat::of(&cases.iter().map(f).collect::<Vec<_>>());
    let times: Option<Vec<f64>> = cases.iter().map(|c| c.manual_time_min).collect();
    Ok(SummaryReport {
        cases: cases.to_vec(),
        vol_ref_cm3: col(|c| c.vol_ref_cm3)?,
        vol_auto_cm3: col(|c| c.vol_auto_cm3)?,
        voxels_ref: col(|c| c.voxels_ref as f64)?,
        voxels_auto: col(|c| c.voxels_auto as f64)?,
        dsc_percent: col(|c| 100.0 * c.dsc)?,
        manual_time_min: times.map(|t| Stat::of(&t)).transpose()?,
    })
}

const LABEL: usize = 10;
const CELL: usize = 20;

impl SummaryReport {
    /// Aligned text table: two header lines, then `min`, `max` and
    /// `mean ± sd` rows for reference/automatic volume and voxel count,
    /// Dice (%) and, when present, manual time.
    pub fn render_table(&self) -> String {
        let mut columns: Vec<(String, String, Stat, usize)> = vec![
            ("Volume (cm^3)".into(), "reference".into(), self.vol_ref_cm3, 2),
            (String::new(), "algorithm".into(), self.vol_auto_cm3, 2),
            ("Number of voxels".into(), "reference".into(), self.voxels_ref, 0),
            (String::new(), "algorithm".into(), self.voxels_auto, 0),
            ("DSC (%)".into(), String::new(), self.dsc_percent, 2),
        ];
        if let Some(t) = self.manual_time_min {
            columns.push(("Manual time (min)".into(), String::new(), t, 2));
        }

        let mut out = String::new();
        let line = |out: &mut String, label: &str, cells: Vec<String>| {
            let mut s = format!("{label:<LABEL$}");
            for c in cells {
                let _ = write!(s, "{c:<CELL$}");
            }
            out.push_str(s.trim_end());
            out.push('\n');
        };
        line(&mut out, "", columns.iter().map(|c| c.0.clone()).collect());
        line(&mut out, "", columns.iter().map(|c| c.1.clone()).collect());
        let fixed = |v: f64, d: usize| format!("{v:.d$}");
        line(&mut out, "min", columns.iter().map(|c| fixed(c.2.min, c.3)).collect());
        line(&mut out, "max", columns.iter().map(|c| fixed(c.2.max, c.3)).collect());
        line(
            &mut out,
            "mean ± sd",
            columns
                .iter()
                .map(|c| {
                    // counts get one decimal for the mean
                    let d = c.3.max(1);
                    format!("{:.d$} ± {:.d$}", c.2.mean, c.2.std)
                })
                .collect(),
        );
        let _ = writeln!(out, "{} case(s); sd is the population standard deviation", self.cases.len());
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary is serializable");
        s.push('\n');
        s
    }
}
