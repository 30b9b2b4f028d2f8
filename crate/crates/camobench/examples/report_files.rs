//! Deterministic report files: JSON, per-curve CSV, and a ranking table.
//!
//! Identical inputs must produce byte-identical files — the property that
//! makes golden-file tests and diff-based regression checks work. Floats
//! are written in shortest-roundtrip form, so re-parsing recovers exact
//! values. Run with `cargo run --example report_files`.

use camobench::harness::{
    emit_ranking, emit_report, run_tracker, synthetic_dataset, ReportFormat, SyntheticTracker,
};
use camobench::metrics::{evaluate_tracker, rank_trackers, Aggregation, EvaluationReport};

fn main() {
    let dataset = synthetic_dataset(42, 6);
    let trackers = [
        SyntheticTracker::Oracle,
        SyntheticTracker::Noisy {
            sigma: 6.0,
            seed: 3,
        },
    ];
    let reports: Vec<EvaluationReport> = trackers
        .iter()
        .map(|t| evaluate_tracker(&dataset, &run_tracker(t, &dataset)).unwrap())
        .collect();

    let dir = tempfile::tempdir().expect("temp dir");
    let formats = [ReportFormat::Json, ReportFormat::Csv];
    for report in &reports {
        let files = emit_report(report, dir.path(), &formats, Aggregation::Pooled).unwrap();
        println!("{}:", report.tracker);
        for f in &files {
            let len = std::fs::metadata(f).unwrap().len();
            println!("  {} ({len} bytes)", f.file_name().unwrap().to_string_lossy());
        }
    }

    let ranking = emit_ranking(dir.path(), &rank_trackers(&reports)).unwrap();
    println!("\n{}", std::fs::read_to_string(&ranking).unwrap());

    // Write everything a second time into a fresh directory: every file
    // comes out byte-identical.
    let dir2 = tempfile::tempdir().expect("temp dir");
    for report in &reports {
        let first = emit_report(report, dir.path(), &formats, Aggregation::Pooled).unwrap();
        let second = emit_report(report, dir2.path(), &formats, Aggregation::Pooled).unwrap();
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        }
    }
    println!("re-run produced byte-identical files");

    // JSON round-trips losslessly: the parsed AUC is the same f64, not an
    // approximation.
    let body = std::fs::read_to_string(dir.path().join("oracle.json")).unwrap();
    let parsed: EvaluationReport = serde_json::from_str(&body).unwrap();
    assert_eq!(parsed.overall.success_auc, reports[0].overall.success_auc);
    println!("JSON round-trip recovered success AUC = {}", parsed.overall.success_auc);
}
