//! Challenge attributes: the 12 per-sequence flags, the numeric rules that
//! derive three of them from box geometry, and co-occurrence counting.

use serde::{Deserialize, Serialize};

use super::parse::DatasetError;
use super::types::{Dataset, Sequence};

/// Sequence-level challenge attributes, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Attribute {
    /// Illumination Variation
    IV,
    /// Scale Variation
    SV,
    /// Deformation
    DEF,
    /// Motion Blur
    MB,
    /// Fast Motion: center moves by at least 20% of the object's own size
    /// between consecutive frames.
    FM,
    /// Out-of-View
    OV,
    /// Low Resolution: object area smaller than 900 px².
    LR,
    /// Partial Occlusion
    POC,
    /// Rotation
    ROT,
    /// Full Occlusion
    FOC,
    /// Aspect Ratio Change: width/height outside [0.5, 2].
    ARC,
    /// Background Clutter; set on every sequence of a camouflage benchmark.
    BC,
}

impl Attribute {
    /// All 12 attributes in the order used by `attributes.txt`.
    pub const ALL: [Attribute; 12] = [
        Attribute::IV,
        Attribute::SV,
        Attribute::DEF,
        Attribute::MB,
        Attribute::FM,
        Attribute::OV,
        Attribute::LR,
        Attribute::POC,
        Attribute::ROT,
        Attribute::FOC,
        Attribute::ARC,
        Attribute::BC,
    ];

    /// The 11 attributes used for co-occurrence statistics (BC excluded:
    /// it is set on every sequence, so its row would duplicate the totals).
    pub const CO_OCCURRENCE: [Attribute; 11] = [
        Attribute::IV,
        Attribute::SV,
        Attribute::DEF,
        Attribute::MB,
        Attribute::FM,
        Attribute::OV,
        Attribute::LR,
        Attribute::POC,
        Attribute::ROT,
        Attribute::FOC,
        Attribute::ARC,
    ];

    /// Position in the file order.
    pub fn index(self) -> usize {
        Attribute::ALL.iter().position(|a| *a == self).unwrap()
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            Attribute::IV => "IV",
            Attribute::SV => "SV",
            Attribute::DEF => "DEF",
            Attribute::MB => "MB",
            Attribute::FM => "FM",
            Attribute::OV => "OV",
            Attribute::LR => "LR",
            Attribute::POC => "POC",
            Attribute::ROT => "ROT",
            Attribute::FOC => "FOC",
            Attribute::ARC => "ARC",
            Attribute::BC => "BC",
        }
    }

    pub fn from_abbrev(s: &str) -> Option<Attribute> {
        Attribute::ALL.iter().copied().find(|a| a.abbrev() == s)
    }
}

impl std::fmt::Display for Attribute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.abbrev())
    }
}

/// The 12 boolean attribute flags of one sequence.
///
/// The flag order is part of the `attributes.txt` file format and matches
/// [`Attribute::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AttributeSet {
    flags: [bool; 12],
}

impl AttributeSet {
    pub fn new(flags: [bool; 12]) -> Self {
        Self { flags }
    }

    pub fn get(&self, attr: Attribute) -> bool {
        self.flags[attr.index()]
    }

    pub fn set(&mut self, attr: Attribute, value: bool) {
        self.flags[attr.index()] = value;
    }

    pub fn with(mut self, attr: Attribute) -> Self {
        self.set(attr, true);
        self
    }

    /// Attributes that are set, in file order.
    pub fn iter_set(&self) -> impl Iterator<Item = Attribute> + '_ {
        Attribute::ALL.iter().copied().filter(|a| self.get(*a))
    }

    /// Parse one `attributes.txt` line: exactly 12 comma-separated 0/1.
    pub fn parse_line(line: &str) -> Result<Self, DatasetError> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 12 {
            return Err(DatasetError::AttributeCount {
                found: fields.len(),
            });
        }
        let mut flags = [false; 12];
        for (i, field) in fields.iter().enumerate() {
            flags[i] = match field.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(DatasetError::AttributeValue {
                        position: i + 1,
                        token: other.to_string(),
                    })
                }
            };
        }
        Ok(Self { flags })
    }

    /// Render as an `attributes.txt` line (no trailing newline).
    pub fn to_line(&self) -> String {
        self.flags
            .iter()
            .map(|f| if *f { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Per-frame results of the numeric attribute rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameTriggers {
    pub fast_motion: bool,
    pub low_resolution: bool,
    pub aspect_ratio_change: bool,
}

/// Output of [`derive_frame_attributes`]: per-frame triggers plus the
/// sequence-level flags (true if any frame triggers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedAttributes {
    pub per_frame: Vec<FrameTriggers>,
    pub fast_motion: bool,
    pub low_resolution: bool,
    pub aspect_ratio_change: bool,
}

/// Area threshold for Low Resolution, in px²; strict "smaller than".
pub const LOW_RESOLUTION_AREA: f64 = 900.0;
/// Aspect-ratio band [0.5, 2]; ratios strictly outside trigger ARC.
pub const ASPECT_RATIO_BAND: (f64, f64) = (0.5, 2.0);
/// Fast Motion: displacement at least this fraction of the object's size.
pub const FAST_MOTION_FRACTION: f64 = 0.2;

/// Apply the numeric attribute rules to one sequence.
///
/// - LR at frame t: `w·h < 900`.
/// - ARC at frame t: `w/h < 0.5` or `w/h > 2` (the band edges do not trigger).
/// - FM at frame t: frames t−1 and t both present and the center displacement
///   is at least `0.2·size` of the earlier frame, with `size = √(w·h)`.
///
/// Absent frames trigger nothing. This is an audit tool: the flags declared
/// in `attributes.txt` stay authoritative and are never overwritten.
pub fn derive_frame_attributes(seq: &Sequence) -> DerivedAttributes {
    let mut per_frame = vec![FrameTriggers::default(); seq.frames.len()];
    for (t, frame) in seq.frames.iter().enumerate() {
        let Some(bbox) = frame.present_box() else {
            continue;
        };
        let triggers = &mut per_frame[t];
        triggers.low_resolution = bbox.area() < LOW_RESOLUTION_AREA;
        let ratio = bbox.aspect_ratio();
        triggers.aspect_ratio_change = ratio < ASPECT_RATIO_BAND.0 || ratio > ASPECT_RATIO_BAND.1;
        if t > 0 {
            if let Some(prev) = seq.frames[t - 1].present_box() {
                let (cx, cy) = bbox.center();
                let (px, py) = prev.center();
                let displacement = ((cx - px).powi(2) + (cy - py).powi(2)).sqrt();
                let size = prev.area().sqrt();
                triggers.fast_motion = displacement >= FAST_MOTION_FRACTION * size;
            }
        }
    }
    DerivedAttributes {
        fast_motion: per_frame.iter().any(|t| t.fast_motion),
        low_resolution: per_frame.iter().any(|t| t.low_resolution),
        aspect_ratio_change: per_frame.iter().any(|t| t.aspect_ratio_change),
        per_frame,
    }
}

/// Pairwise sequence counts over the 11 co-occurrence attributes.
///
/// `get(a, b)` is the number of sequences carrying both `a` and `b`; the
/// diagonal holds the per-attribute totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoOccurrenceMatrix {
    counts: [[u32; 11]; 11],
}

impl CoOccurrenceMatrix {
    pub fn from_counts(counts: [[u32; 11]; 11]) -> Self {
        Self { counts }
    }

    pub fn get(&self, a: Attribute, b: Attribute) -> u32 {
        self.counts[Self::pos(a)][Self::pos(b)]
    }

    pub fn counts(&self) -> &[[u32; 11]; 11] {
        &self.counts
    }

    fn pos(attr: Attribute) -> usize {
        Attribute::CO_OCCURRENCE
            .iter()
            .position(|a| *a == attr)
            .expect("BC has no co-occurrence row")
    }

    pub fn is_symmetric(&self) -> bool {
        (0..11).all(|i| (0..11).all(|j| self.counts[i][j] == self.counts[j][i]))
    }

    /// A pairwise count can never exceed either marginal.
    pub fn is_diagonal_dominant(&self) -> bool {
        (0..11).all(|i| (0..11).all(|j| self.counts[i][i] >= self.counts[i][j]))
    }

    /// Render as CSV with attribute headers.
    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = Attribute::CO_OCCURRENCE.iter().map(|a| a.abbrev()).collect();
        let mut out = format!("attribute,{}\n", header.join(","));
        for (i, attr) in Attribute::CO_OCCURRENCE.iter().enumerate() {
            let row: Vec<String> = self.counts[i].iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("{},{}\n", attr.abbrev(), row.join(",")));
        }
        out
    }
}

/// Count pairwise attribute co-occurrences over a dataset.
pub fn co_occurrence(ds: &Dataset) -> CoOccurrenceMatrix {
    let mut counts = [[0u32; 11]; 11];
    for seq in ds.sequences() {
        for (i, a) in Attribute::CO_OCCURRENCE.iter().enumerate() {
            if !seq.attributes.get(*a) {
                continue;
            }
            for (j, b) in Attribute::CO_OCCURRENCE.iter().enumerate() {
                if seq.attributes.get(*b) {
                    counts[i][j] += 1;
                }
            }
        }
    }
    CoOccurrenceMatrix { counts }
}
