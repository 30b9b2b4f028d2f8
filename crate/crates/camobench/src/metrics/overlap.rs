//! Per-frame comparison primitives: IoU and center errors.

use super::MetricsError;
use crate::dataset::BoundingBox;

fn check_finite(b: &BoundingBox, which: &'static str) -> Result<(), MetricsError> {
    if b.is_finite() {
        Ok(())
    } else {
        Err(MetricsError::NonFiniteBox { which })
    }
}

fn check_ground_truth(gt: &BoundingBox) -> Result<(), MetricsError> {
    check_finite(gt, "ground-truth")?;
    if gt.w > 0.0 && gt.h > 0.0 {
        Ok(())
    } else {
        Err(MetricsError::DegenerateGroundTruth { w: gt.w, h: gt.h })
    }
}

/// Intersection over union of a prediction and a ground-truth box.
///
/// The ground truth must have positive extent; a degenerate *prediction*
/// (zero or negative width/height) simply has zero area and scores 0 — a
/// tracker reporting a collapsed box is wrong, not malformed.
pub fn iou(pred: &BoundingBox, gt: &BoundingBox) -> Result<f64, MetricsError> {
    check_finite(pred, "prediction")?;
    check_ground_truth(gt)?;
    let pred_area = (pred.w.max(0.0)) * (pred.h.max(0.0));
    let ix = (pred.right().min(gt.right()) - pred.x.max(gt.x)).max(0.0);
    let iy = (pred.bottom().min(gt.bottom()) - pred.y.max(gt.y)).max(0.0);
    let inter = if pred_area == 0.0 { 0.0 } else { ix * iy };
    let union = pred_area + gt.area() - inter;
    Ok(inter / union)
}

/// Euclidean distance between box centers, in pixels.
pub fn center_error(pred: &BoundingBox, gt: &BoundingBox) -> Result<f64, MetricsError> {
    check_finite(pred, "prediction")?;
    check_finite(gt, "ground-truth")?;
    let (px, py) = pred.center();
    let (gx, gy) = gt.center();
    Ok(((px - gx).powi(2) + (py - gy).powi(2)).sqrt())
}

/// Center distance with each axis divided by the ground-truth box size,
/// making the error scale with the object instead of the image.
pub fn normalized_center_error(pred: &BoundingBox, gt: &BoundingBox) -> Result<f64, MetricsError> {
    check_finite(pred, "prediction")?;
    check_ground_truth(gt)?;
    let (px, py) = pred.center();
    let (gx, gy) = gt.center();
    let dx = (px - gx) / gt.w;
    let dy = (py - gy) / gt.h;
    Ok((dx * dx + dy * dy).sqrt())
}
