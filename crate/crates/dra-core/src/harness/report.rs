//! Experiment reports: per-repetition accuracies, mean recognition rate,
//! standard error, wall-clock times and the resolved config echo. Emitted
//! as JSON or CSV with a stable field order.

use super::config::ResolvedConfig;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Config(format!("unknown report format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentReport {
    pub config: ResolvedConfig,
    pub per_repetition_accuracy: Vec<f64>,
    pub mean_rr: f64,
    pub standard_error: f64,
    pub train_time_s: f64,
    pub test_time_s: f64,
}

/// Mean and standard error (sample stddev over sqrt(R); 0 for R = 1).
pub fn mean_and_ste(accs: &[f64]) -> (f64, f64) {
    let r = accs.len();
    let mean = accs.iter().sum::<f64>() / r as f64;
    if r < 2 {
        return (mean, 0.0);
    }
    let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, (var / r as f64).sqrt())
}

impl ExperimentReport {
    pub fn from_accuracies(
        config: ResolvedConfig,
        per_repetition_accuracy: Vec<f64>,
        train_time_s: f64,
        test_time_s: f64,
    ) -> Self {
        let (mean_rr, standard_error) = mean_and_ste(&per_repetition_accuracy);
        ExperimentReport {
            config,
            per_repetition_accuracy,
            mean_rr,
            standard_error,
            train_time_s,
            test_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall-clock fields removed, for byte-level comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("train_time_s");
            obj.remove("test_time_s");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("repetition,accuracy\n");
        for (i, a) in self.per_repetition_accuracy.iter().enumerate() {
            out.push_str(&format!("{i},{a:.16e}\n"));
        }
        out.push_str(&format!("mean_rr,{:.16e}\n", self.mean_rr));
        out.push_str(&format!("standard_error,{:.16e}\n", self.standard_error));
        out.push_str(&format!("train_time_s,{:.16e}\n", self.train_time_s));
        out.push_str(&format!("test_time_s,{:.16e}\n", self.test_time_s));
        out
    }
}

/// Writes the report to `path` in the requested format.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let body = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    let mut f = std::fs::File::create(path.as_ref())?;
    f.write_all(body.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}
