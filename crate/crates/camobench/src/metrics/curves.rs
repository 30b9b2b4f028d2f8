//! Threshold curves and their summary statistics.

use serde::{Deserialize, Serialize};

/// Precision is conventionally quoted at this center-error threshold.
pub const PRECISION_REFERENCE_PX: f64 = 20.0;

/// A metric sampled on a fixed, ascending threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCurve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl MetricCurve {
    /// Area under the curve: the arithmetic mean of the samples. With the
    /// uniform grids used here this is the standard trapezoid-free AUC.
    pub fn auc(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// The value at an exact grid threshold, if present.
    pub fn value_at(&self, threshold: f64) -> Option<f64> {
        self.thresholds
            .iter()
            .position(|t| *t == threshold)
            .map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise mean of several curves over the same grid. Returns `None`
    /// for an empty set or mismatched grids.
    pub fn mean_of(curves: &[&MetricCurve]) -> Option<MetricCurve> {
        let first = curves.first()?;
        if curves.iter().any(|c| c.thresholds != first.thresholds) {
            return None;
        }
        let n = curves.len() as f64;
        let values = (0..first.values.len())
            .map(|i| curves.iter().map(|c| c.values[i]).sum::<f64>() / n)
            .collect();
        Some(MetricCurve {
            thresholds: first.thresholds.clone(),
            values,
        })
    }
}

/// Center-error grid: 0, 1, …, 50 px.
pub fn precision_thresholds() -> Vec<f64> {
    (0..=50).map(f64::from).collect()
}

/// IoU grid: i/20 for i = 0..=20, i.e. 0.00, 0.05, …, 1.00.
pub fn success_thresholds() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 20.0).collect()
}

/// Normalized-error grid: i/200 for i = 0..=100, covering [0, 0.5].
pub fn normalized_precision_thresholds() -> Vec<f64> {
    (0..=100).map(|i| f64::from(i) / 200.0).collect()
}

/// Fraction of samples `<= t` for each threshold, over sorted data.
fn fraction_within(sorted: &[f64], thresholds: &[f64]) -> Vec<f64> {
    if sorted.is_empty() {
        return vec![0.0; thresholds.len()];
    }
    let n = sorted.len() as f64;
    thresholds
        .iter()
        .map(|t| sorted.partition_point(|e| *e <= *t) as f64 / n)
        .collect()
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Precision curve over raw center errors (pixels): fraction of frames with
/// error ≤ τ.
pub fn precision_curve(center_errors: &[f64]) -> MetricCurve {
    let thresholds = precision_thresholds();
    let values = fraction_within(&sorted(center_errors), &thresholds);
    MetricCurve { thresholds, values }
}

/// Normalized precision curve: fraction of frames with normalized center
/// error ≤ τ.
pub fn normalized_precision_curve(normalized_errors: &[f64]) -> MetricCurve {
    let thresholds = normalized_precision_thresholds();
    let values = fraction_within(&sorted(normalized_errors), &thresholds);
    MetricCurve { thresholds, values }
}

/// Success curve: fraction of frames whose IoU *strictly exceeds* θ. The
/// strict comparison keeps the θ = 0 sample meaningful: a frame with zero
/// overlap fails every threshold.
pub fn success_curve(ious: &[f64]) -> MetricCurve {
    let thresholds = success_thresholds();
    let data = sorted(ious);
    let n = data.len() as f64;
    let values = if data.is_empty() {
        vec![0.0; thresholds.len()]
    } else {
        thresholds
            .iter()
            .map(|t| (data.len() - data.partition_point(|v| *v <= *t)) as f64 / n)
            .collect()
    };
    MetricCurve { thresholds, values }
}
