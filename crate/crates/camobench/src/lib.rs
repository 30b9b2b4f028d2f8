//! Benchmark toolkit for camouflaged-object tracking.
//!
//! The crate has four parts:
//!
//! - [`dataset`] — an in-memory model of a tracking benchmark (sequences,
//!   per-frame bounding boxes, absence flags, challenge attributes), plus
//!   text-format parsing, annotation-rule validation, attribute derivation,
//!   and co-occurrence statistics.
//! - [`metrics`] — one-pass evaluation: center-error precision, normalized
//!   precision, IoU success curves, AUC, attribute-subset evaluation, and
//!   tracker ranking.
//! - [`encoder`] — a desk-scale, fp64 reference implementation of a
//!   multi-level feature sensing encoder: a token-pruning transformer
//!   stream blended with a full-token stream through a level-axis MLP,
//!   with finite-difference gradient verification.
//! - [`harness`] — synthetic trackers with analytically known scores,
//!   bundled fixtures (including a 200-sequence attribute census), and
//!   deterministic JSON/CSV report emission.
//!
//! Start with the runnable examples (`cargo run --example evaluate_trackers`)
//! or the `camobench` binary, a thin wrapper over [`cli`].

pub mod cli;
pub mod dataset;
pub mod encoder;
pub mod harness;
pub mod metrics;

pub use dataset::{AttributeSet, BoundingBox, Dataset, FrameAnnotation, Sequence};
pub use encoder::{EncoderConfig, EncoderWeights};
pub use harness::SyntheticTracker;
pub use metrics::{EvaluationReport, MetricCurve, TrackerResult};
