//! Test bed: synthetic trackers, golden fixtures, and report files.
//!
//! Real tracking benchmarks need video and trained models; this module
//! supplies the pieces that make the rest of the crate verifiable without
//! either. [`trackers`] holds deterministic stand-in trackers whose metric
//! curves are known in closed form, [`fixtures`] the bundled attribute
//! census (verified against its reference table on every load) and seeded
//! synthetic datasets, and [`report_io`] byte-stable JSON/CSV report
//! writing.

pub mod fixtures;
pub mod report_io;
pub mod trackers;

pub use fixtures::{
    attribute_fixture, published_cooccurrence, synthetic_dataset, CENSUS_SEQUENCES,
};
pub use report_io::{curve_csv, emit_ranking, emit_report, ranking_csv, ReportFormat};
pub use trackers::{run_tracker, SyntheticTracker};

use std::path::PathBuf;
use thiserror::Error;

/// Errors from fixture loading and report writing.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bundled fixture data failed its load-time verification.
    #[error("fixture corrupt: {detail}")]
    FixtureCorrupt { detail: String },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}
