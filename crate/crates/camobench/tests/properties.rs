//! Property tests: invariants that should hold for *any* input, checked
//! over randomized cases. Deterministic boundary values live in the unit
//! tests; these exercise the algebra — symmetry, monotonicity, inverses,
//! and roundtrips.

use camobench::dataset::{
    co_occurrence, derive_frame_attributes, parse_sequence, serialize_sequence, Attribute,
    AttributeSet, BoundingBox, Dataset, FrameAnnotation, Sequence,
};
use camobench::encoder::{keep_count, pad_restore, Tape};
use camobench::metrics::{
    center_error, iou, normalized_precision_curve, precision_curve, rank_trackers, success_curve,
};
use ndarray::Array2;
use proptest::prelude::*;

// --- generators ---------------------------------------------------------------

/// Boxes with integer-valued coordinates: every arithmetic step on them
/// (centers, shifts, areas) is exact in f64, which lets invariance
/// properties assert bitwise equality.
fn integer_box() -> impl Strategy<Value = BoundingBox> {
    (0i32..500, 0i32..400, 1i32..160, 1i32..120).prop_map(|(x, y, w, h)| {
        BoundingBox::new(f64::from(x), f64::from(y), f64::from(w), f64::from(h))
    })
}

fn flags() -> impl Strategy<Value = [bool; 12]> {
    let mut flag: [_; 12] = std::array::from_fn(|_| any::<bool>().boxed());
    flag[11] = Just(true).boxed(); // the shared clutter flag is universal
    flag
}

/// A structurally valid sequence: first frame present, absences only in
/// the interior, boxes inside a generous canvas.
fn valid_sequence() -> impl Strategy<Value = Sequence> {
    (
        proptest::collection::vec((integer_box(), any::<bool>()), 1..24),
        flags(),
    )
        .prop_map(|(frames, flags)| {
            let frames: Vec<FrameAnnotation> = frames
                .into_iter()
                .enumerate()
                .map(|(i, (bbox, absent))| {
                    let absent = absent && i > 0;
                    FrameAnnotation {
                        bbox: (!absent).then_some(bbox),
                        absent,
                    }
                })
                .collect();
            Sequence {
                name: "generated".into(),
                category: "synthetic".into(),
                frames,
                attributes: AttributeSet::new(flags),
                frame_width: 700,
                frame_height: 560,
            }
        })
}

// --- overlap metrics ------------------------------------------------------------

proptest! {
    #[test]
    fn iou_is_symmetric_and_bounded(a in integer_box(), b in integer_box()) {
        let ab = iou(&a, &b).unwrap();
        let ba = iou(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(iou(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn center_error_is_translation_invariant(
        a in integer_box(),
        b in integer_box(),
        dx in -200i32..200,
        dy in -200i32..200,
    ) {
        let shift = |bx: &BoundingBox| {
            BoundingBox::new(bx.x + f64::from(dx), bx.y + f64::from(dy), bx.w, bx.h)
        };
        let before = center_error(&a, &b).unwrap();
        let after = center_error(&shift(&a), &shift(&b)).unwrap();
        prop_assert_eq!(before, after);
        prop_assert!(before >= 0.0);
        prop_assert_eq!(center_error(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn iou_is_translation_invariant(
        a in integer_box(),
        b in integer_box(),
        dx in -200i32..200,
        dy in -200i32..200,
    ) {
        let shift = |bx: &BoundingBox| {
            BoundingBox::new(bx.x + f64::from(dx), bx.y + f64::from(dy), bx.w, bx.h)
        };
        prop_assert_eq!(
            iou(&a, &b).unwrap(),
            iou(&shift(&a), &shift(&b)).unwrap()
        );
    }
}

// --- curves ------------------------------------------------------------------------

proptest! {
    #[test]
    fn precision_curves_are_monotone_and_bounded(
        errors in proptest::collection::vec(0.0f64..120.0, 1..200),
    ) {
        let curve = precision_curve(&errors);
        prop_assert!(curve.values.iter().all(|v| (0.0..=1.0).contains(v)));
        // Larger tolerance can only admit more frames.
        prop_assert!(curve.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn success_curves_are_antitone_and_bounded(
        ious in proptest::collection::vec(0.0f64..=1.0, 1..200),
    ) {
        let curve = success_curve(&ious);
        prop_assert!(curve.values.iter().all(|v| (0.0..=1.0).contains(v)));
        // A stricter overlap requirement can only reject more frames.
        prop_assert!(curve.values.windows(2).all(|w| w[0] >= w[1]));
        // Strict comparison: nothing exceeds an overlap of 1.
        prop_assert_eq!(*curve.values.last().unwrap(), 0.0);
    }

    #[test]
    fn normalized_precision_mirrors_precision_monotonicity(
        errors in proptest::collection::vec(0.0f64..1.0, 1..200),
    ) {
        let curve = normalized_precision_curve(&errors);
        prop_assert!(curve.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(curve.thresholds.len(), 101);
    }
}

// --- dataset roundtrip and derived attributes -----------------------------------------

proptest! {
    #[test]
    fn sequences_survive_a_serialize_parse_roundtrip(seq in valid_sequence()) {
        let files = serialize_sequence(&seq);
        let back = parse_sequence(&seq.name, &files).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn derived_attributes_are_translation_invariant(
        seq in valid_sequence(),
        dx in -50i32..50,
        dy in -50i32..50,
    ) {
        let mut shifted = seq.clone();
        for frame in &mut shifted.frames {
            if let Some(bbox) = &mut frame.bbox {
                bbox.x += f64::from(dx);
                bbox.y += f64::from(dy);
            }
        }
        let a = derive_frame_attributes(&seq);
        let b = derive_frame_attributes(&shifted);
        // Size-based flags cannot see position at all, and motion is a
        // function of displacements, which a rigid shift leaves intact.
        prop_assert_eq!(a.low_resolution, b.low_resolution);
        prop_assert_eq!(a.aspect_ratio_change, b.aspect_ratio_change);
        prop_assert_eq!(a.fast_motion, b.fast_motion);
    }

    #[test]
    fn cooccurrence_is_symmetric_with_dominant_diagonal(
        all_flags in proptest::collection::vec(flags(), 1..40),
    ) {
        let sequences: Vec<Sequence> = all_flags
            .iter()
            .enumerate()
            .map(|(i, f)| Sequence {
                name: format!("seq-{i:03}"),
                category: "synthetic".into(),
                frames: vec![FrameAnnotation {
                    bbox: Some(BoundingBox::new(10.0, 10.0, 50.0, 50.0)),
                    absent: false,
                }],
                attributes: AttributeSet::new(*f),
                frame_width: 640,
                frame_height: 480,
            })
            .collect();
        let dataset = Dataset::new("generated", sequences).unwrap();
        let matrix = co_occurrence(&dataset);
        prop_assert!(matrix.is_symmetric());
        prop_assert!(matrix.is_diagonal_dominant());
        // The diagonal counts the attribute's own frequency, so every
        // joint count is bounded by both marginals.
        for a in Attribute::CO_OCCURRENCE {
            for b in Attribute::CO_OCCURRENCE {
                prop_assert!(matrix.get(a, b) <= matrix.get(a, a).min(matrix.get(b, b)));
            }
        }
    }

    #[test]
    fn attribute_lines_roundtrip(f in flags()) {
        let set = AttributeSet::new(f);
        let back = AttributeSet::parse_line(&set.to_line()).unwrap();
        prop_assert_eq!(back, set);
    }
}

// --- pruning / restoration ---------------------------------------------------------

proptest! {
    #[test]
    fn restoring_a_pruned_stream_inverts_the_gather(
        rows in 1usize..16,
        cols in 1usize..8,
        keep_mask in proptest::collection::vec(any::<bool>(), 16),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let full = Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0));

        let mut kept: Vec<usize> = (0..rows).filter(|r| keep_mask[*r]).collect();
        if kept.is_empty() {
            kept.push(0); // keep at least one row so the stream is non-empty
        }

        let mut tape = Tape::new();
        let v = tape.leaf(full.clone());
        let pruned = tape.gather_rows(v, kept.clone());
        let restored_id = pad_restore(&mut tape, pruned, &kept, rows);
        let restored = tape.value(restored_id);

        prop_assert_eq!(restored.dim(), (rows, cols));
        for r in 0..rows {
            for c in 0..cols {
                let expected = if kept.contains(&r) { full[(r, c)] } else { 0.0 };
                prop_assert_eq!(restored[(r, c)], expected);
            }
        }
    }

    #[test]
    fn keep_count_stays_within_bounds_and_is_monotone(
        search in 1usize..500,
        lo in 0.01f64..1.0,
        hi in 0.01f64..1.0,
    ) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let kept_lo = keep_count(lo, search);
        let kept_hi = keep_count(hi, search);
        prop_assert!(kept_lo >= 1, "a stage never empties the stream");
        prop_assert!(kept_hi <= search, "a stage never invents tokens");
        prop_assert!(kept_lo <= kept_hi, "keeping more is monotone in the ratio");
        prop_assert_eq!(keep_count(1.0, search), search);
    }
}

// --- ranking --------------------------------------------------------------------------

proptest! {
    #[test]
    fn ranking_is_invariant_under_input_order(
        seed in any::<u64>(),
        n_trackers in 2usize..5,
    ) {
        use camobench::harness::{run_tracker, synthetic_dataset, SyntheticTracker};
        use camobench::metrics::evaluate_tracker;
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        let dataset = synthetic_dataset(99, 3);
        let pool = [
            SyntheticTracker::Oracle,
            SyntheticTracker::ConstantOffset { dx: 25.0, dy: 0.0 },
            SyntheticTracker::Scaled { factor: 0.5 },
            SyntheticTracker::Noisy { sigma: 3.0, seed: 5 },
        ];
        let mut reports: Vec<_> = pool[..n_trackers]
            .iter()
            .map(|t| evaluate_tracker(&dataset, &run_tracker(t, &dataset)).unwrap())
            .collect();

        let baseline = rank_trackers(&reports);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        reports.shuffle(&mut rng);
        let shuffled = rank_trackers(&reports);

        prop_assert_eq!(baseline.len(), shuffled.len());
        for (a, b) in baseline.iter().zip(&shuffled) {
            prop_assert_eq!(&a.tracker, &b.tracker);
            prop_assert_eq!(a.rank, b.rank);
            prop_assert_eq!(a.success_auc, b.success_auc);
        }
        // Ranks are 1-based, contiguous, and ordered by score.
        for (i, row) in baseline.iter().enumerate() {
            prop_assert_eq!(row.rank, i + 1);
        }
        prop_assert!(baseline
            .windows(2)
            .all(|w| w[0].success_auc >= w[1].success_auc));
    }
}
