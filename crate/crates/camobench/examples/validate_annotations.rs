//! Check annotation files against the machine-checkable rules.
//!
//! Loads the bundled mini dataset from disk, validates it, then breaks a
//! copy in two ways to show what the validator reports. Run with
//! `cargo run --example validate_annotations`.

use std::path::Path;

use camobench::dataset::{load_dataset, validate_rules, BoundingBox, FrameAnnotation};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini");
    let dataset = load_dataset(&root).expect("bundled fixture parses");
    println!("loaded {} sequences from {}", dataset.len(), root.display());

    // The shipped fixture is clean: every evaluable rule passes.
    for seq in dataset.sequences() {
        let report = validate_rules(seq);
        println!(
            "  {:<8} {} violations (not machine-checkable: {})",
            seq.name,
            report.violations.len(),
            report
                .not_evaluated
                .iter()
                .map(|r| r.name())
                .collect::<Vec<_>>()
                .join(", ")
        );
        assert!(report.is_clean());
    }

    // Break rule 3: mark the first frame absent. Trackers initialize on
    // frame 0, so a sequence must start with the target present.
    let mut broken = dataset.get("frog-1").unwrap().clone();
    broken.frames[0] = FrameAnnotation {
        bbox: None,
        absent: true,
    };
    let report = validate_rules(&broken);
    println!("\nabsent first frame:");
    for v in &report.violations {
        println!("  {} — {}", v.rule.label(), v.detail);
    }

    // Break rule 2 and the structural bounds check: a present frame with
    // a box poking outside the frame rectangle.
    let mut out_of_bounds = dataset.get("snake-3").unwrap().clone();
    out_of_bounds.frames[1] = FrameAnnotation {
        bbox: Some(BoundingBox::new(300.0, 220.0, 60.0, 40.0)),
        absent: false,
    };
    let report = validate_rules(&out_of_bounds);
    println!("\nbox outside a 320×240 frame:");
    for v in &report.violations {
        println!("  {} — {}", v.rule.label(), v.detail);
    }
}
