//! CSV and JSON report files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalReport;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] =
    ["method", "family", "accuracy", "acc_star", "prop1_rate", "ci", "centroids", "wall_time_s"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub config: serde_json::Value,
    pub reports: Vec<EvalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spearman: Option<f64>,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

pub fn write_csv(reports: &[EvalReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in reports {
        w.write_record([
            r.method.as_str().to_string(),
            r.family.clone(),
            r.accuracy.to_string(),
            r.acc_star.map(|a| a.to_string()).unwrap_or_default(),
            r.prop1_rate.to_string(),
            r.ci.to_string(),
            r.centroids.to_string(),
            r.wall_time_s.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(file: &ReportFile, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    let text = serde_json::to_string_pretty(file).map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}
