//! Deterministic report files.
//!
//! Identical reports must serialize to identical bytes: JSON field order
//! is fixed (maps are ordered), floats print in shortest-roundtrip form,
//! and every file ends with a newline. That makes golden-file tests and
//! byte-comparison across runs meaningful.

use std::fs;
use std::path::{Path, PathBuf};

use crate::metrics::{Aggregation, EvaluationReport, MetricCurve, RankedTracker};

use super::HarnessError;

/// On-disk report flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// One `<tracker>.json` holding the full report.
    Json,
    /// One `<tracker>_<curve>.csv` per metric curve.
    Csv,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Render one curve as `threshold,value` CSV. Floats use Rust's shortest
/// lossless formatting, so re-parsing recovers the exact values.
pub fn curve_csv(curve: &MetricCurve) -> String {
    let mut out = String::from("threshold,value\n");
    for (t, v) in curve.thresholds.iter().zip(&curve.values) {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// Render a ranking table as CSV, best tracker first.
pub fn ranking_csv(ranked: &[RankedTracker]) -> String {
    let mut out = String::from("rank,tracker,success_auc,precision_at_20,normalized_precision\n");
    for r in ranked {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.rank, r.tracker, r.success_auc, r.precision_at_20, r.normalized_precision_score
        ));
    }
    out
}

/// Write a tracker's report files into `dir` (created if needed) and
/// return the paths written, in order.
///
/// `aggregation` selects which whole-dataset bundle the CSV curves come
/// from; the JSON always contains both. Two calls with the same report
/// write byte-identical files.
pub fn emit_report(
    report: &EvaluationReport,
    dir: &Path,
    formats: &[ReportFormat],
    aggregation: Aggregation,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            ReportFormat::Json => {
                let path = dir.join(format!("{}.json", report.tracker));
                let mut body =
                    serde_json::to_string_pretty(report).expect("report serializes to JSON");
                body.push('\n');
                fs::write(&path, body).map_err(io_err(&path))?;
                written.push(path);
            }
            ReportFormat::Csv => {
                let bundle = report.bundle(aggregation);
                let curves = [
                    ("precision", &bundle.precision),
                    ("normalized_precision", &bundle.normalized_precision),
                    ("success", &bundle.success),
                ];
                for (label, curve) in curves {
                    let path = dir.join(format!("{}_{label}.csv", report.tracker));
                    fs::write(&path, curve_csv(curve)).map_err(io_err(&path))?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

/// Write the ranking table as `ranking.csv` in `dir`.
pub fn emit_ranking(dir: &Path, ranked: &[RankedTracker]) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join("ranking.csv");
    fs::write(&path, ranking_csv(ranked)).map_err(io_err(&path))?;
    Ok(path)
}
