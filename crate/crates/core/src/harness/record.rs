//! One CSV row per (trial, estimator) and simple aggregation.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::Field;

/// CSV column order.
pub const COLUMNS: [&str; 19] = [
    "experiment_id",
    "trial",
    "seed",
    "p",
    "n",
    "n_splits",
    "gamma",
    "field",
    "model",
    "model_param",
    "estimator",
    "op_error",
    "op_rel_error",
    "frob_sq_per_p",
    "lambda1",
    "overlap_sq",
    "pred_op_error",
    "pred_lambda1",
    "pred_overlap_sq",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment_id: String,
    pub trial: usize,
    pub seed: u64,
    pub p: usize,
    pub n: usize,
    pub n_splits: usize,
    pub gamma: f64,
    pub field: Field,
    pub model: String,
    pub model_param: Option<f64>,
    pub estimator: String,
    pub op_error: f64,
    pub op_rel_error: f64,
    pub frob_sq_per_p: f64,
    pub lambda1: f64,
    pub overlap_sq: Option<f64>,
    pub pred_op_error: Option<f64>,
    pub pred_lambda1: Option<f64>,
    pub pred_overlap_sq: Option<f64>,
}

/// Writes a header and the rows in the given order. Floats use the shortest
/// representation that round-trips; missing values are empty.
pub fn write_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(COLUMNS)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// [`write_csv`] to a file, creating parent directories.
pub fn write_csv_file(path: &Path, records: &[TrialRecord]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_csv(File::create(path)?, records)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<std::result::Result<Vec<_>, _>>()?)
}

/// Mean and standard deviation of a column over one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub experiment_id: String,
    pub estimator: String,
    pub model_param: Option<f64>,
    pub trials: usize,
    pub mean_op_rel_error: f64,
    pub sd_op_rel_error: f64,
    pub mean_frob_sq_per_p: f64,
    pub mean_lambda1: f64,
    pub mean_overlap_sq: Option<f64>,
    pub pred_op_error: Option<f64>,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups rows by `(experiment_id, estimator)` in first-seen order.
pub fn summarize(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let key = (r.experiment_id.as_str(), r.estimator.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(id, est)| {
            let rows: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.experiment_id == id && r.estimator == est)
                .collect();
            let col = |f: fn(&TrialRecord) -> f64| rows.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (mean_rel, sd_rel) = mean_sd(&col(|r| r.op_rel_error));
            let overlaps: Vec<f64> = rows.iter().filter_map(|r| r.overlap_sq).collect();
            CellSummary {
                experiment_id: id.to_string(),
                estimator: est.to_string(),
                model_param: rows[0].model_param,
                trials: rows.len(),
                mean_op_rel_error: mean_rel,
                sd_op_rel_error: sd_rel,
                mean_frob_sq_per_p: mean_sd(&col(|r| r.frob_sq_per_p)).0,
                mean_lambda1: mean_sd(&col(|r| r.lambda1)).0,
                mean_overlap_sq: (overlaps.len() == rows.len()).then(|| mean_sd(&overlaps).0),
                pred_op_error: rows[0].pred_op_error,
            }
        })
        .collect()
}
