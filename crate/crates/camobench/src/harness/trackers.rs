//! Synthetic trackers with analytically known metric values.
//!
//! Each tracker transforms the ground truth by a closed-form rule, so the
//! exact shape of its precision and success curves is known in advance:
//! the oracle scores perfectly, a constant offset of 25 px makes the
//! precision curve step from 0 to 1 at τ = 25, and a centered half-scale
//! box yields IoU exactly 0.25 on every evaluated frame. That turns the
//! whole metrics pipeline into something checkable without real video.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{BoundingBox, Dataset, Sequence};
use crate::metrics::TrackerResult;

/// A deterministic stand-in for a real tracking algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticTracker {
    /// Emits the ground truth itself; on absent frames, repeats the last
    /// present box (keeping one box per frame — absent frames are outside
    /// the evaluation pool anyway).
    Oracle,
    /// Shifts every box center by `(dx, dy)` pixels.
    ConstantOffset { dx: f64, dy: f64 },
    /// Scales width and height by `factor` about the box center.
    Scaled { factor: f64 },
    /// Perturbs box centers with seeded Gaussian noise of standard
    /// deviation `sigma`; per-sequence streams are derived from the
    /// sequence name, so results do not depend on iteration order.
    Noisy { sigma: f64, seed: u64 },
    /// Tracks perfectly until 0-based frame `frame`, then freezes and
    /// repeats the box it was holding from that point on.
    LostAfter { frame: usize },
}

impl SyntheticTracker {
    /// Directory-safe identifier: used as the tracker name in results and
    /// file trees.
    pub fn name(&self) -> String {
        match self {
            SyntheticTracker::Oracle => "oracle".to_string(),
            SyntheticTracker::ConstantOffset { dx, dy } => format!("offset-{dx}-{dy}"),
            SyntheticTracker::Scaled { factor } => format!("scaled-{factor}"),
            SyntheticTracker::Noisy { sigma, seed } => format!("noisy-{sigma}-s{seed}"),
            SyntheticTracker::LostAfter { frame } => format!("lost-after-{frame}"),
        }
    }
}

/// The box a tracker works from at each frame: the ground truth when the
/// target is present, otherwise the last present box (the first frame is
/// always present in valid data).
fn reference_boxes(seq: &Sequence) -> Vec<BoundingBox> {
    let first_present = seq
        .frames
        .iter()
        .find_map(|f| f.present_box())
        .copied()
        .unwrap_or_else(|| BoundingBox::new(0.0, 0.0, 1.0, 1.0));
    let mut last = first_present;
    seq.frames
        .iter()
        .map(|f| {
            if let Some(b) = f.present_box() {
                last = *b;
            }
            last
        })
        .collect()
}

fn offset_box(b: &BoundingBox, dx: f64, dy: f64) -> BoundingBox {
    BoundingBox::new(b.x + dx, b.y + dy, b.w, b.h)
}

fn scaled_box(b: &BoundingBox, factor: f64) -> BoundingBox {
    let (cx, cy) = b.center();
    let (w, h) = (b.w * factor, b.h * factor);
    BoundingBox::new(cx - w / 2.0, cy - h / 2.0, w, h)
}

/// 64-bit FNV-1a over a byte string, for deriving per-sequence noise
/// streams from the sequence name.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn run_on_sequence(tracker: &SyntheticTracker, seq: &Sequence) -> Vec<BoundingBox> {
    let reference = reference_boxes(seq);
    match tracker {
        SyntheticTracker::Oracle => reference,
        SyntheticTracker::ConstantOffset { dx, dy } => {
            reference.iter().map(|b| offset_box(b, *dx, *dy)).collect()
        }
        SyntheticTracker::Scaled { factor } => {
            reference.iter().map(|b| scaled_box(b, *factor)).collect()
        }
        SyntheticTracker::Noisy { sigma, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(seq.name.as_bytes()));
            let normal = Normal::new(0.0, *sigma).expect("finite sigma");
            reference
                .iter()
                .map(|b| {
                    let dx = normal.sample(&mut rng);
                    let dy = normal.sample(&mut rng);
                    offset_box(b, dx, dy)
                })
                .collect()
        }
        SyntheticTracker::LostAfter { frame } => {
            let mut out = Vec::with_capacity(reference.len());
            for (i, b) in reference.iter().enumerate() {
                if i < *frame {
                    out.push(*b);
                } else {
                    // Frozen: repeat whatever the tracker held last; if it
                    // loses the target immediately, that is frame 0's box.
                    let held = out.last().copied().unwrap_or(reference[0]);
                    out.push(held);
                }
            }
            out
        }
    }
}

/// Run a synthetic tracker over every sequence, producing one box per
/// frame (absent frames included, as a real tracker would).
pub fn run_tracker(tracker: &SyntheticTracker, dataset: &Dataset) -> TrackerResult {
    let mut result = TrackerResult::new(tracker.name());
    for seq in dataset.sequences() {
        result.insert(seq.name.clone(), run_on_sequence(tracker, seq));
    }
    result
}
