use serde::{Deserialize, Serialize};

use super::attributes::AttributeSet;
use super::parse::DatasetError;

/// Axis-aligned bounding box in pixel coordinates, image origin top-left.
///
/// Fields are real-valued: interpolated annotations and tracker outputs are
/// not restricted to integer pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    /// Left edge.
    pub x: f64,
    /// Top edge.
    pub y: f64,
    /// Width, must be positive for a present box.
    pub w: f64,
    /// Height, must be positive for a present box.
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Center point `(x + w/2, y + h/2)`.
    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Width-to-height ratio.
    pub fn aspect_ratio(&self) -> f64 {
        self.w / self.h
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.w.is_finite() && self.h.is_finite()
    }

    /// A box usable as a present annotation or a prediction: finite fields
    /// and positive extent.
    pub fn is_valid(&self) -> bool {
        self.is_finite() && self.w > 0.0 && self.h > 0.0
    }
}

/// One frame of annotation: either a present box or an absence marker.
///
/// For valid data `absent == true` exactly when `bbox` is `None`. Parsing
/// keeps whatever box an absent frame carried so that rule validation can
/// report the inconsistency instead of silently erasing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameAnnotation {
    pub bbox: Option<BoundingBox>,
    pub absent: bool,
}

impl FrameAnnotation {
    pub fn present(bbox: BoundingBox) -> Self {
        Self {
            bbox: Some(bbox),
            absent: false,
        }
    }

    pub fn missing() -> Self {
        Self {
            bbox: None,
            absent: true,
        }
    }

    /// The box of a present frame, `None` when the target is absent.
    pub fn present_box(&self) -> Option<&BoundingBox> {
        if self.absent {
            None
        } else {
            self.bbox.as_ref()
        }
    }
}

/// An annotated video sequence: ordered frames, a category label, the
/// sequence-level attribute flags, and the frame geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    pub name: String,
    /// Category label; an open set so non-benchmark data loads unchanged.
    pub category: String,
    pub frames: Vec<FrameAnnotation>,
    pub attributes: AttributeSet,
    pub frame_width: u32,
    pub frame_height: u32,
}

impl Sequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Frames where the target is present (the evaluation pool).
    pub fn present_frames(&self) -> impl Iterator<Item = (usize, &BoundingBox)> {
        self.frames
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.present_box().map(|b| (i, b)))
    }
}

/// A named collection of sequences with unique names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    sequences: Vec<Sequence>,
}

impl Dataset {
    /// Build a dataset, rejecting duplicate sequence names.
    pub fn new(name: impl Into<String>, sequences: Vec<Sequence>) -> Result<Self, DatasetError> {
        let mut seen = std::collections::BTreeSet::new();
        for seq in &sequences {
            if !seen.insert(seq.name.as_str()) {
                return Err(DatasetError::DuplicateSequence {
                    name: seq.name.clone(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            sequences,
        })
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Sequence> {
        self.sequences.iter().find(|s| s.name == name)
    }
}
