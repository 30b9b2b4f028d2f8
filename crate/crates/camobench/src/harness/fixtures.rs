//! Golden fixtures: the bundled attribute census and seeded synthetic
//! datasets.
//!
//! The attribute census is a concrete per-sequence flag assignment whose
//! pairwise counts reproduce a published 11×11 co-occurrence table
//! exactly. Only the table is authoritative: the assignment was found
//! once by constraint search and committed as data, and
//! [`attribute_fixture`] re-verifies it against [`published_cooccurrence`]
//! on every load, so a corrupted data file fails loudly instead of
//! skewing downstream counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::dataset::{
    co_occurrence, Attribute, AttributeSet, BoundingBox, CoOccurrenceMatrix, Dataset,
    FrameAnnotation, Sequence,
};

/// The census flag rows shipped with the crate: one line per sequence,
/// twelve comma-separated 0/1 flags in standard attribute order.
const CENSUS_DATA: &str = include_str!("../../fixtures/attribute_census.txt");

/// Number of sequences in the census.
pub const CENSUS_SEQUENCES: usize = 200;

/// The reference co-occurrence table the census must reproduce: counts of
/// sequences carrying both the row and column attribute (diagonal = how
/// many carry the attribute at all). Background clutter is universal and
/// therefore excluded from the table.
pub fn published_cooccurrence() -> CoOccurrenceMatrix {
    CoOccurrenceMatrix::from_counts([
        [5, 0, 1, 1, 0, 0, 0, 2, 0, 0, 0],
        [0, 29, 14, 12, 7, 8, 3, 17, 2, 1, 4],
        [1, 14, 59, 32, 9, 16, 5, 27, 13, 3, 8],
        [1, 12, 32, 72, 12, 19, 10, 25, 8, 4, 6],
        [0, 7, 9, 12, 14, 5, 2, 8, 3, 2, 1],
        [0, 8, 16, 19, 5, 39, 3, 12, 4, 2, 2],
        [0, 3, 5, 10, 2, 3, 21, 6, 0, 0, 0],
        [2, 17, 27, 25, 8, 12, 6, 58, 11, 4, 6],
        [0, 2, 13, 8, 3, 4, 0, 11, 29, 1, 3],
        [0, 1, 3, 4, 2, 2, 0, 4, 1, 4, 0],
        [0, 4, 8, 6, 1, 2, 0, 6, 3, 0, 9],
    ])
}

/// Placeholder geometry for census stubs: a single present frame with a
/// fixed in-bounds box. The census carries attribute information only;
/// single-frame sequences are recognized as geometry-free by the
/// attribute audit.
fn stub_frame() -> FrameAnnotation {
    FrameAnnotation {
        bbox: Some(BoundingBox::new(16.0, 16.0, 128.0, 96.0)),
        absent: false,
    }
}

/// Build the 200-sequence attribute census dataset and verify it against
/// the reference table.
///
/// Each sequence is a stub — declared flags plus one placeholder frame —
/// named `census-001` through `census-200`. Verification checks every
/// entry of the 11×11 table plus universal background clutter, and fails
/// with [`HarnessError::FixtureCorrupt`] on the first mismatch.
pub fn attribute_fixture() -> Result<Dataset, HarnessError> {
    let corrupt = |detail: String| HarnessError::FixtureCorrupt { detail };
    let mut sequences = Vec::with_capacity(CENSUS_SEQUENCES);
    for (i, line) in CENSUS_DATA.lines().enumerate() {
        let attributes = AttributeSet::parse_line(line)
            .map_err(|e| corrupt(format!("census line {}: {e}", i + 1)))?;
        if !attributes.get(Attribute::BC) {
            return Err(corrupt(format!(
                "census line {}: background clutter must be universal",
                i + 1
            )));
        }
        sequences.push(Sequence {
            name: format!("census-{:03}", i + 1),
            category: "census".to_string(),
            frames: vec![stub_frame()],
            attributes,
            frame_width: 640,
            frame_height: 480,
        });
    }
    if sequences.len() != CENSUS_SEQUENCES {
        return Err(corrupt(format!(
            "census holds {} sequences, expected {CENSUS_SEQUENCES}",
            sequences.len()
        )));
    }
    let dataset = Dataset::new("attribute-census", sequences)
        .map_err(|e| corrupt(format!("census assembly: {e}")))?;

    let observed = co_occurrence(&dataset);
    let expected = published_cooccurrence();
    for a in Attribute::CO_OCCURRENCE {
        for b in Attribute::CO_OCCURRENCE {
            if observed.get(a, b) != expected.get(a, b) {
                return Err(corrupt(format!(
                    "census co-occurrence [{a}][{b}] = {}, reference says {}",
                    observed.get(a, b),
                    expected.get(a, b)
                )));
            }
        }
    }
    Ok(dataset)
}

/// Categories used by the synthetic dataset, cycled in order.
const CATEGORIES: [&str; 5] = ["amphibian", "fish", "insect", "reptile", "crustacean"];

/// Generate a seeded random dataset with exactly known properties:
/// integer coordinates, box sides divisible by 4 (so centered half-scale
/// boxes stay on the grid), first frame always present, optional
/// mid-sequence absence gaps, every box inside a 640×480 frame, and
/// background clutter on every sequence.
///
/// The same `(seed, n_sequences)` always generates identical content.
pub fn synthetic_dataset(seed: u64, n_sequences: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (frame_w, frame_h) = (640u32, 480u32);
    let mut sequences = Vec::with_capacity(n_sequences);
    for i in 0..n_sequences {
        let name = format!("seq-{:02}", i + 1);
        let category = CATEGORIES[i % CATEGORIES.len()].to_string();
        let n_frames: usize = rng.gen_range(20..=40);
        // Side lengths in multiples of 4, between 32 and 96 px.
        let mut w: i64 = 4 * rng.gen_range(8..=24i64);
        let mut h: i64 = 4 * rng.gen_range(8..=24i64);
        let mut x = rng.gen_range(40..=400i64);
        let mut y = rng.gen_range(40..=300i64);

        // One absence gap in roughly half the sequences, never at frame 0.
        let gap = if rng.gen_bool(0.5) {
            let start = rng.gen_range(5..=12usize);
            let len = rng.gen_range(2..=5usize);
            Some(start..start + len)
        } else {
            None
        };

        let mut frames = Vec::with_capacity(n_frames);
        for f in 0..n_frames {
            // Integer random walk; occasional size change keeps sides in
            // range and divisible by 4.
            x = (x + rng.gen_range(-8..=8)).clamp(4, i64::from(frame_w) - w - 4);
            y = (y + rng.gen_range(-8..=8)).clamp(4, i64::from(frame_h) - h - 4);
            if rng.gen_bool(0.2) {
                w = (w + 4 * rng.gen_range(-1..=1i64)).clamp(32, 96);
                h = (h + 4 * rng.gen_range(-1..=1i64)).clamp(32, 96);
                x = x.min(i64::from(frame_w) - w - 4);
                y = y.min(i64::from(frame_h) - h - 4);
            }
            let absent = gap.as_ref().is_some_and(|g| g.contains(&f));
            frames.push(if absent {
                FrameAnnotation {
                    bbox: None,
                    absent: true,
                }
            } else {
                FrameAnnotation {
                    bbox: Some(BoundingBox::new(x as f64, y as f64, w as f64, h as f64)),
                    absent: false,
                }
            });
        }

        let mut attributes = AttributeSet::default().with(Attribute::BC);
        if gap.is_some() {
            attributes.set(Attribute::FOC, true);
        }
        // A couple of random challenge labels for subset slicing.
        for attr in [
            Attribute::SV,
            Attribute::MB,
            Attribute::DEF,
            Attribute::POC,
        ] {
            if rng.gen_bool(0.4) {
                attributes.set(attr, true);
            }
        }

        sequences.push(Sequence {
            name,
            category,
            frames,
            attributes,
            frame_width: frame_w,
            frame_height: frame_h,
        });
    }
    Dataset::new(format!("synthetic-{seed}"), sequences).expect("generated names are unique")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::validate_rules;

    #[test]
    fn census_loads_and_matches_reference_counts() {
        let ds = attribute_fixture().expect("bundled census must verify");
        assert_eq!(ds.len(), CENSUS_SEQUENCES);
        assert!(ds
            .sequences()
            .iter()
            .all(|s| s.attributes.get(Attribute::BC)));
    }

    #[test]
    fn census_diagonal_counts_match_attribute_totals() {
        let ds = attribute_fixture().unwrap();
        let m = co_occurrence(&ds);
        let total = |attr: Attribute| {
            ds.sequences()
                .iter()
                .filter(|s| s.attributes.get(attr))
                .count() as u32
        };
        for attr in Attribute::CO_OCCURRENCE {
            assert_eq!(m.get(attr, attr), total(attr), "{attr} diagonal");
        }
    }

    #[test]
    fn synthetic_dataset_is_reproducible_and_rule_clean() {
        let a = synthetic_dataset(42, 10);
        let b = synthetic_dataset(42, 10);
        assert_eq!(a.len(), 10);
        for (sa, sb) in a.sequences().iter().zip(b.sequences()) {
            assert_eq!(sa, sb);
        }
        for seq in a.sequences() {
            let report = validate_rules(seq);
            assert!(report.is_clean(), "{}: {:?}", seq.name, report.violations);
        }
    }

    #[test]
    fn synthetic_boxes_sit_on_the_quarter_grid() {
        let ds = synthetic_dataset(7, 6);
        for seq in ds.sequences() {
            for (_, b) in seq.present_frames() {
                assert_eq!(b.x.fract(), 0.0);
                assert_eq!(b.y.fract(), 0.0);
                assert_eq!(b.w as i64 % 4, 0);
                assert_eq!(b.h as i64 % 4, 0);
            }
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = synthetic_dataset(1, 3);
        let b = synthetic_dataset(2, 3);
        assert_ne!(a.sequences()[0].frames, b.sequences()[0].frames);
    }
}
