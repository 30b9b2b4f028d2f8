//! Dataset model: sequences, annotations, attributes, and their file formats.
//!
//! The on-disk layout follows the common single-object-tracking convention:
//! one directory per sequence holding `groundtruth.txt` (one `x,y,w,h` line
//! per frame), `absence.label` (one `0`/`1` per line, `1` = target fully
//! occluded or out of view), `attributes.txt` (a single line of 12
//! comma-separated `0`/`1` flags), and `meta.ini` (`key=value` pairs for
//! `width`, `height`, `category`). A `list.txt` at the dataset root
//! enumerates sequence names.

mod attributes;
mod parse;
mod rules;
mod types;

pub use attributes::{
    co_occurrence, derive_frame_attributes, Attribute, AttributeSet, CoOccurrenceMatrix,
    DerivedAttributes, FrameTriggers,
};
pub use parse::{
    load_dataset, load_sequence, parse_sequence, save_dataset, save_sequence, serialize_sequence,
    DatasetError, SequenceFiles, SequenceMeta,
};
pub use rules::{validate_rules, RuleId, RuleReport, RuleViolation};
pub use types::{BoundingBox, Dataset, FrameAnnotation, Sequence};
