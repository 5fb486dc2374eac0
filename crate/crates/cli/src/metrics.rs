//! Metrics CSV: one row per (model, split) with MAE/MSE in standardized
//! units plus wall-clock fit and prediction seconds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub dataset: String,
    pub model: String,
    pub split: String,
    pub mae: f64,
    pub mse: f64,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.map_err(|e| CliError::Parse(e.to_string()))?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        let rows = vec![MetricsRow {
            dataset: "otc".into(),
            model: "hoeg".into(),
            split: "test".into(),
            mae: 0.5,
            mse: 0.4,
            fit_seconds: 1.25,
            predict_seconds: 0.01,
        }];
        write_metrics(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("dataset,model,split,mae,mse,fit_seconds,predict_seconds"));
        assert_eq!(read_metrics(&path).unwrap(), rows);
    }
}
