//! One-pass evaluation metrics.
//!
//! A tracker is initialized on the first frame and run once over a sequence;
//! its per-frame boxes are then compared to the ground truth on the
//! *evaluation pool*: frames where the target is present. Absent frames are
//! excluded — a tracker is neither rewarded nor punished for its output
//! while there is nothing to track.
//!
//! Three curves summarize a run, each sampled on a fixed threshold grid so
//! results are comparable across trackers:
//!
//! - **Precision**: fraction of frames whose center error is within τ
//!   pixels, τ = 0..=50. The headline number is the value at 20 px.
//! - **Normalized precision**: the center error is first divided per-axis by
//!   the ground-truth box size, making the curve resolution-independent;
//!   sampled on [0, 0.5] and summarized by its mean.
//! - **Success**: fraction of frames whose IoU strictly exceeds θ, θ
//!   sampled in [0, 1]; summarized by the area under the curve (the mean of
//!   the samples), which equals mean IoU in the limit of a dense grid.
//!
//! Scores are aggregated two ways: *frame-pooled* (every present frame
//! weighs the same; long sequences dominate) and *sequence-averaged* (every
//! sequence weighs the same). Both appear in reports; rankings use the
//! pooled numbers.

mod curves;
mod io;
mod overlap;
mod report;

pub use curves::{
    normalized_precision_curve, normalized_precision_thresholds, precision_curve,
    precision_thresholds, success_curve, success_thresholds, MetricCurve, PRECISION_REFERENCE_PX,
};
pub use io::{load_tracker_result, save_tracker_result, TrackerResult};
pub use overlap::{center_error, iou, normalized_center_error};
pub use report::{
    attribute_evaluation, evaluate_tracker, rank_trackers, rank_trackers_with, Aggregation,
    EvaluationReport, MetricBundle,
    RankedTracker,
};

use thiserror::Error;

/// Errors from computing metrics or loading tracker output.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{which} box has a non-finite coordinate")]
    NonFiniteBox { which: &'static str },
    #[error("ground-truth box has non-positive extent ({w}x{h})")]
    DegenerateGroundTruth { w: f64, h: f64 },
    #[error("sequence {sequence:?}: tracker produced {found} boxes for {expected} frames")]
    LengthMismatch {
        sequence: String,
        expected: usize,
        found: usize,
    },
    #[error("no prediction for sequence {sequence:?}")]
    MissingPrediction { sequence: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {detail}")]
    PredictionParse {
        path: String,
        line: usize,
        detail: String,
    },
}
