//! Whole-benchmark evaluation: pooled, averaged, per-attribute, and
//! per-sequence scores, plus tracker ranking.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curves::{
    normalized_precision_curve, precision_curve, success_curve, MetricCurve,
    PRECISION_REFERENCE_PX,
};
use super::io::TrackerResult;
use super::overlap::{center_error, iou, normalized_center_error};
use super::MetricsError;
use crate::dataset::{Attribute, Dataset, Sequence};

/// The three curves plus their headline numbers for one pool of frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricBundle {
    /// Present frames contributing to this pool.
    pub frame_count: usize,
    pub precision: MetricCurve,
    pub normalized_precision: MetricCurve,
    pub success: MetricCurve,
    /// Precision at the 20 px reference threshold.
    pub precision_at_20: f64,
    /// Mean of the normalized precision curve.
    pub normalized_precision_score: f64,
    /// Mean of the success curve.
    pub success_auc: f64,
}

impl MetricBundle {
    fn from_samples(center: &[f64], norm: &[f64], ious: &[f64]) -> Self {
        let precision = precision_curve(center);
        let normalized_precision = normalized_precision_curve(norm);
        let success = success_curve(ious);
        Self {
            frame_count: ious.len(),
            precision_at_20: precision.value_at(PRECISION_REFERENCE_PX).unwrap_or(0.0),
            normalized_precision_score: normalized_precision.auc(),
            success_auc: success.auc(),
            precision,
            normalized_precision,
            success,
        }
    }

    fn from_curves(
        frame_count: usize,
        precision: MetricCurve,
        normalized_precision: MetricCurve,
        success: MetricCurve,
    ) -> Self {
        Self {
            frame_count,
            precision_at_20: precision.value_at(PRECISION_REFERENCE_PX).unwrap_or(0.0),
            normalized_precision_score: normalized_precision.auc(),
            success_auc: success.auc(),
            precision,
            normalized_precision,
            success,
        }
    }
}

/// Everything measured about one tracker on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub tracker: String,
    pub dataset: String,
    /// Frame-pooled scores: every present frame counts once.
    pub overall: MetricBundle,
    /// Sequence-averaged scores: curves are the pointwise mean of the
    /// per-sequence curves, so every sequence counts once.
    pub averaged: MetricBundle,
    /// Frame-pooled scores over the sequences carrying each attribute.
    /// Attributes no sequence carries are omitted.
    pub per_attribute: BTreeMap<Attribute, MetricBundle>,
    pub per_sequence: BTreeMap<String, MetricBundle>,
}

/// Per-frame samples of one sequence's evaluation pool.
struct SequenceSamples {
    name: String,
    center: Vec<f64>,
    norm: Vec<f64>,
    iou: Vec<f64>,
}

fn sequence_samples(
    seq: &Sequence,
    result: &TrackerResult,
) -> Result<SequenceSamples, MetricsError> {
    let preds = result
        .get(&seq.name)
        .ok_or_else(|| MetricsError::MissingPrediction {
            sequence: seq.name.clone(),
        })?;
    if preds.len() != seq.len() {
        return Err(MetricsError::LengthMismatch {
            sequence: seq.name.clone(),
            expected: seq.len(),
            found: preds.len(),
        });
    }
    let mut samples = SequenceSamples {
        name: seq.name.clone(),
        center: Vec::new(),
        norm: Vec::new(),
        iou: Vec::new(),
    };
    for (idx, gt) in seq.present_frames() {
        let pred = &preds[idx];
        samples.center.push(center_error(pred, gt)?);
        samples.norm.push(normalized_center_error(pred, gt)?);
        samples.iou.push(iou(pred, gt)?);
    }
    Ok(samples)
}

/// Compute per-sequence samples in parallel, preserving dataset order.
fn collect_samples(
    ds: &Dataset,
    result: &TrackerResult,
) -> Result<Vec<SequenceSamples>, MetricsError> {
    ds.sequences()
        .par_iter()
        .map(|seq| sequence_samples(seq, result))
        .collect()
}

fn pooled_bundle(samples: &[&SequenceSamples]) -> MetricBundle {
    let center: Vec<f64> = samples.iter().flat_map(|s| s.center.iter().copied()).collect();
    let norm: Vec<f64> = samples.iter().flat_map(|s| s.norm.iter().copied()).collect();
    let ious: Vec<f64> = samples.iter().flat_map(|s| s.iou.iter().copied()).collect();
    MetricBundle::from_samples(&center, &norm, &ious)
}

/// Evaluate one tracker's output against a dataset.
///
/// Every dataset sequence must be covered with exactly one box per frame.
/// Work is parallelized per sequence; the output is independent of thread
/// count.
pub fn evaluate_tracker(
    ds: &Dataset,
    result: &TrackerResult,
) -> Result<EvaluationReport, MetricsError> {
    let samples = collect_samples(ds, result)?;

    let per_sequence: BTreeMap<String, MetricBundle> = samples
        .iter()
        .map(|s| {
            (
                s.name.clone(),
                MetricBundle::from_samples(&s.center, &s.norm, &s.iou),
            )
        })
        .collect();

    let overall = pooled_bundle(&samples.iter().collect::<Vec<_>>());

    // Sequence-averaged curves: every sequence weighs the same.
    let seq_bundles: Vec<&MetricBundle> = samples
        .iter()
        .map(|s| per_sequence.get(&s.name).unwrap())
        .collect();
    let mean_curve = |pick: fn(&MetricBundle) -> &MetricCurve| {
        MetricCurve::mean_of(&seq_bundles.iter().map(|b| pick(b)).collect::<Vec<_>>())
    };
    let averaged = match (
        mean_curve(|b| &b.precision),
        mean_curve(|b| &b.normalized_precision),
        mean_curve(|b| &b.success),
    ) {
        (Some(p), Some(n), Some(s)) => {
            MetricBundle::from_curves(overall.frame_count, p, n, s)
        }
        // Empty dataset: fall back to the (all-zero) pooled bundle.
        _ => overall.clone(),
    };

    let mut per_attribute = BTreeMap::new();
    for attr in Attribute::ALL {
        let subset: Vec<&SequenceSamples> = ds
            .sequences()
            .iter()
            .zip(&samples)
            .filter(|(seq, _)| seq.attributes.get(attr))
            .map(|(_, s)| s)
            .collect();
        if !subset.is_empty() {
            per_attribute.insert(attr, pooled_bundle(&subset));
        }
    }

    Ok(EvaluationReport {
        tracker: result.tracker.clone(),
        dataset: ds.name.clone(),
        overall,
        averaged,
        per_attribute,
        per_sequence,
    })
}

/// Frame-pooled scores per attribute subset, without the full report.
pub fn attribute_evaluation(
    ds: &Dataset,
    result: &TrackerResult,
) -> Result<BTreeMap<Attribute, MetricBundle>, MetricsError> {
    Ok(evaluate_tracker(ds, result)?.per_attribute)
}

/// One row of a leaderboard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTracker {
    /// 1-based position.
    pub rank: usize,
    pub tracker: String,
    pub success_auc: f64,
    pub precision_at_20: f64,
    pub normalized_precision_score: f64,
}

/// Which aggregation drives a ranking or an export: frame-pooled (every
/// present frame counts once) or sequence-averaged (every sequence counts
/// once).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Pooled,
    Averaged,
}

impl EvaluationReport {
    /// The whole-dataset bundle for the chosen aggregation.
    pub fn bundle(&self, aggregation: Aggregation) -> &MetricBundle {
        match aggregation {
            Aggregation::Pooled => &self.overall,
            Aggregation::Averaged => &self.averaged,
        }
    }
}

/// Order trackers by frame-pooled success AUC, best first; exact ties fall
/// back to lexicographic tracker name so the order is total.
pub fn rank_trackers(reports: &[EvaluationReport]) -> Vec<RankedTracker> {
    rank_trackers_with(reports, Aggregation::Pooled)
}

/// [`rank_trackers`] with an explicit choice of aggregation.
pub fn rank_trackers_with(
    reports: &[EvaluationReport],
    aggregation: Aggregation,
) -> Vec<RankedTracker> {
    let mut rows: Vec<&EvaluationReport> = reports.iter().collect();
    rows.sort_by(|a, b| {
        b.bundle(aggregation)
            .success_auc
            .total_cmp(&a.bundle(aggregation).success_auc)
            .then_with(|| a.tracker.cmp(&b.tracker))
    });
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let bundle = r.bundle(aggregation);
            RankedTracker {
                rank: i + 1,
                tracker: r.tracker.clone(),
                success_auc: bundle.success_auc,
                precision_at_20: bundle.precision_at_20,
                normalized_precision_score: bundle.normalized_precision_score,
            }
        })
        .collect()
}
