//! Derive geometry-based attribute flags and compare with declarations.
//!
//! Three of the twelve challenge attributes follow mechanically from the
//! boxes: fast motion (center moves ≥ 20% of the object's own size
//! between consecutive frames), low resolution (area < 900 px²), and
//! aspect ratio change (width/height outside [0.5, 2]). The audit never
//! overwrites declared flags — annotators may know things the geometry
//! does not — it only reports agreement. Run with
//! `cargo run --example attribute_audit`.

use camobench::dataset::{
    derive_frame_attributes, Attribute, AttributeSet, BoundingBox, FrameAnnotation, Sequence,
};

fn sequence(name: &str, boxes: &[(f64, f64, f64, f64)], declared: AttributeSet) -> Sequence {
    Sequence {
        name: name.into(),
        category: "demo".into(),
        frames: boxes
            .iter()
            .map(|&(x, y, w, h)| FrameAnnotation {
                bbox: Some(BoundingBox::new(x, y, w, h)),
                absent: false,
            })
            .collect(),
        attributes: declared,
        frame_width: 640,
        frame_height: 480,
    }
}

fn main() {
    // A 20×40 box: area 800 < 900 (low resolution) and ratio 0.5 exactly
    // on the band edge — boundaries do NOT trigger aspect ratio change.
    let lr_only = sequence(
        "lr-only",
        &[(100.0, 100.0, 20.0, 40.0), (102.0, 101.0, 20.0, 40.0)],
        AttributeSet::default()
            .with(Attribute::LR)
            .with(Attribute::BC),
    );

    // A jump of 30 px against a 40×40 box: threshold is 0.2·√1600 = 8,
    // so this is fast motion; the annotator forgot the flag.
    let fm_forgotten = sequence(
        "fm-forgotten",
        &[(100.0, 100.0, 40.0, 40.0), (130.0, 100.0, 40.0, 40.0)],
        AttributeSet::default().with(Attribute::BC),
    );

    for seq in [&lr_only, &fm_forgotten] {
        let derived = derive_frame_attributes(seq);
        println!("{}:", seq.name);
        for (attr, declared, derived) in [
            (Attribute::FM, seq.attributes.get(Attribute::FM), derived.fast_motion),
            (Attribute::LR, seq.attributes.get(Attribute::LR), derived.low_resolution),
            (Attribute::ARC, seq.attributes.get(Attribute::ARC), derived.aspect_ratio_change),
        ] {
            let verdict = if declared == derived { "ok" } else { "DIFFERS" };
            println!("  {attr}: declared {declared}, derived {derived} — {verdict}");
        }
        // Per-frame triggers name the exact frames behind a sequence flag.
        let hot: Vec<usize> = derived
            .per_frame
            .iter()
            .enumerate()
            .filter(|(_, t)| t.fast_motion || t.low_resolution || t.aspect_ratio_change)
            .map(|(i, _)| i)
            .collect();
        println!("  triggering frames: {hot:?}\n");
    }
}
