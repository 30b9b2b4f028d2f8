//! Command-line interface.
//!
//! Six subcommands bind the library together: `eval` (one-pass
//! evaluation), `validate` (annotation rules), `attributes` (flag listing
//! and audit), `cooccur` (co-occurrence export), `encoder-check`
//! (encoder self-test and γ sweep), and `fixtures` (materialize bundled
//! and seeded fixtures on disk).
//!
//! Conventions, kept stable for scripting:
//!
//! * exit codes — `0` success, `1` findings (rule violations, failed
//!   self-checks), `2` missing data (unreadable paths, absent result
//!   files), `3` format/config/usage errors;
//! * machine-readable output (CSV/JSON) goes to standard output or files;
//!   progress and diagnostics go to standard error;
//! * `CAMO_BENCH_THREADS` caps evaluation parallelism (default: all
//!   cores);
//! * identical invocations on identical inputs produce byte-identical
//!   outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{
    co_occurrence, derive_frame_attributes, load_dataset, validate_rules, Attribute, Dataset,
    DatasetError,
};
use crate::encoder::{encoder_check, EncoderConfig, EncoderError};
use crate::harness::{
    attribute_fixture, emit_ranking, emit_report, run_tracker, synthetic_dataset, HarnessError,
    ReportFormat, SyntheticTracker,
};
use crate::metrics::{
    evaluate_tracker, load_tracker_result, rank_trackers_with, Aggregation, EvaluationReport,
    MetricsError,
};

/// Environment variable capping evaluation parallelism.
pub const THREADS_ENV: &str = "CAMO_BENCH_THREADS";

/// Exit code contract.
pub const EXIT_OK: u8 = 0;
/// Findings: rule violations or failed self-checks.
pub const EXIT_FINDINGS: u8 = 1;
/// Missing data: unreadable paths, absent result files.
pub const EXIT_MISSING_DATA: u8 = 2;
/// Format, config, or usage errors.
pub const EXIT_FORMAT: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "camobench",
    version,
    about = "Camouflaged-object tracking benchmark toolkit",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate tracker results against a dataset (one-pass evaluation).
    Eval(EvalArgs),
    /// Check annotation files against the machine-checkable rules.
    Validate(ValidateArgs),
    /// List declared attribute flags; optionally audit derivable ones.
    Attributes(AttributesArgs),
    /// Export the attribute co-occurrence matrix as CSV.
    Cooccur(CooccurArgs),
    /// Run the encoder self-check suite and γ sweep.
    EncoderCheck(EncoderCheckArgs),
    /// Write bundled and seeded fixtures as an on-disk tree.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

impl FormatArg {
    fn formats(self) -> &'static [ReportFormat] {
        match self {
            FormatArg::Json => &[ReportFormat::Json],
            FormatArg::Csv => &[ReportFormat::Csv],
            FormatArg::Both => &[ReportFormat::Json, ReportFormat::Csv],
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Dataset root (contains list.txt and one directory per sequence).
    #[arg(long)]
    dataset: PathBuf,
    /// Results root: one directory per tracker, one `<sequence>.txt` each.
    #[arg(long)]
    results: PathBuf,
    /// Trackers to evaluate (default: every directory under --results).
    #[arg(long, value_delimiter = ',')]
    trackers: Vec<String>,
    /// Where report files and the ranking table are written.
    #[arg(long)]
    out: PathBuf,
    /// Keep per-attribute metric bundles in the reports.
    #[arg(long)]
    per_attribute: bool,
    /// Rank and export curves frame-pooled (the default).
    #[arg(long, conflicts_with = "averaged")]
    pooled: bool,
    /// Rank and export curves sequence-averaged instead of frame-pooled.
    #[arg(long)]
    averaged: bool,
    /// Report file flavor.
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Dataset root to validate.
    #[arg(long)]
    dataset: PathBuf,
}

#[derive(Debug, Args)]
struct AttributesArgs {
    /// Dataset root to read flags from.
    #[arg(long)]
    dataset: PathBuf,
    /// Compare declared FM/LR/ARC flags against values derived from the
    /// box geometry. Sequences with fewer than two frames are treated as
    /// geometry-free stubs and reported as `n/a`.
    #[arg(long)]
    audit: bool,
}

#[derive(Debug, Args)]
struct CooccurArgs {
    /// Dataset root to count over.
    #[arg(long, required_unless_present = "census", conflicts_with = "census")]
    dataset: Option<PathBuf>,
    /// Use the bundled 200-sequence attribute census instead of a dataset.
    #[arg(long)]
    census: bool,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncoderCheckArgs {
    /// Config file: one `key=value` per line, `#` comments allowed.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Individual overrides applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Args)]
struct FixturesArgs {
    /// Directory to create the fixture tree in.
    #[arg(long)]
    out: PathBuf,
    /// Seed for the synthetic dataset.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Sequence count for the synthetic dataset.
    #[arg(long, default_value_t = 10)]
    sequences: usize,
}

/// Parse the `CAMO_BENCH_THREADS` value; `None` input means unset.
fn parse_thread_cap(value: Option<&str>) -> Result<Option<usize>, String> {
    let Some(raw) = value else { return Ok(None) };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be at least 1"));
    }
    Ok(Some(n))
}

/// Entry point: parse arguments, apply the thread cap, dispatch.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_FORMAT };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = std::env::var(THREADS_ENV).ok();
    match parse_thread_cap(threads.as_deref()) {
        Ok(Some(n)) => {
            // A second initialization (e.g. in tests) keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(None) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_FORMAT);
        }
    }
    let code = match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Attributes(args) => cmd_attributes(args),
        Command::Cooccur(args) => cmd_cooccur(args),
        Command::EncoderCheck(args) => cmd_encoder_check(args),
        Command::Fixtures(args) => cmd_fixtures(args),
    };
    ExitCode::from(code)
}

/// Io problems are missing data; everything else is a format error.
fn dataset_exit(e: &DatasetError) -> u8 {
    match e {
        DatasetError::Io { .. } => EXIT_MISSING_DATA,
        _ => EXIT_FORMAT,
    }
}

fn metrics_exit(e: &MetricsError) -> u8 {
    match e {
        MetricsError::MissingPrediction { .. }
        | MetricsError::LengthMismatch { .. }
        | MetricsError::Io { .. } => EXIT_MISSING_DATA,
        _ => EXIT_FORMAT,
    }
}

fn harness_exit(e: &HarnessError) -> u8 {
    match e {
        HarnessError::Io { .. } => EXIT_MISSING_DATA,
        HarnessError::FixtureCorrupt { .. } => EXIT_FORMAT,
    }
}

fn load_dataset_or_exit(root: &Path) -> Result<Dataset, u8> {
    load_dataset(root).map_err(|e| {
        eprintln!("error: {e}");
        dataset_exit(&e)
    })
}

fn cmd_eval(args: &EvalArgs) -> u8 {
    let dataset = match load_dataset_or_exit(&args.dataset) {
        Ok(ds) => ds,
        Err(code) => return code,
    };
    let trackers = if args.trackers.is_empty() {
        match tracker_dirs(&args.results) {
            Ok(t) => t,
            Err(code) => return code,
        }
    } else {
        args.trackers.clone()
    };
    if trackers.is_empty() {
        eprintln!("error: no tracker directories under {}", args.results.display());
        return EXIT_MISSING_DATA;
    }
    let aggregation = if args.averaged {
        Aggregation::Averaged
    } else {
        Aggregation::Pooled
    };

    let mut reports: Vec<EvaluationReport> = Vec::with_capacity(trackers.len());
    for name in &trackers {
        let dir = args.results.join(name);
        eprintln!("evaluating {name} from {}", dir.display());
        let result = match load_tracker_result(&dir) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return metrics_exit(&e);
            }
        };
        let mut report = match evaluate_tracker(&dataset, &result) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return metrics_exit(&e);
            }
        };
        if !args.per_attribute {
            report.per_attribute.clear();
        }
        if let Err(e) = emit_report(&report, &args.out, args.format.formats(), aggregation) {
            eprintln!("error: {e}");
            return harness_exit(&e);
        }
        reports.push(report);
    }

    let ranked = rank_trackers_with(&reports, aggregation);
    match emit_ranking(&args.out, &ranked) {
        Ok(path) => eprintln!("ranking written to {}", path.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return harness_exit(&e);
        }
    }
    print!("{}", crate::harness::ranking_csv(&ranked));
    EXIT_OK
}

/// Sorted directory names under the results root.
fn tracker_dirs(results: &Path) -> Result<Vec<String>, u8> {
    let entries = fs::read_dir(results).map_err(|e| {
        eprintln!("error: reading {}: {e}", results.display());
        EXIT_MISSING_DATA
    })?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| {
            eprintln!("error: reading {}: {e}", results.display());
            EXIT_MISSING_DATA
        })?;
        if entry.path().is_dir() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort();
    Ok(names)
}

fn cmd_validate(args: &ValidateArgs) -> u8 {
    let dataset = match load_dataset_or_exit(&args.dataset) {
        Ok(ds) => ds,
        Err(code) => return code,
    };
    let reports: Vec<_> = dataset.sequences().iter().map(validate_rules).collect();
    if let Some(first) = reports.first() {
        let skipped: Vec<String> = first
            .not_evaluated
            .iter()
            .map(|r| r.label())
            .collect();
        eprintln!("not machine-checkable: {}", skipped.join(", "));
    }
    println!("sequence,frame,rule,detail");
    let mut findings = 0usize;
    for report in &reports {
        for v in &report.violations {
            let frame = v
                .frame
                .map_or_else(|| "-".to_string(), |f| f.to_string());
            println!("{},{},{},\"{}\"", report.sequence, frame, v.rule.label(), v.detail);
            findings += 1;
        }
    }
    eprintln!(
        "{} sequences checked, {} violations",
        dataset.len(),
        findings
    );
    if findings > 0 {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

fn cmd_attributes(args: &AttributesArgs) -> u8 {
    let dataset = match load_dataset_or_exit(&args.dataset) {
        Ok(ds) => ds,
        Err(code) => return code,
    };
    if args.audit {
        println!(
            "sequence,declared_fm,derived_fm,declared_lr,derived_lr,declared_arc,derived_arc,agreement"
        );
        for seq in dataset.sequences() {
            let declared = [
                seq.attributes.get(Attribute::FM),
                seq.attributes.get(Attribute::LR),
                seq.attributes.get(Attribute::ARC),
            ];
            // A single frame carries no motion signal and stub fixtures
            // use exactly one placeholder frame: no geometry to audit.
            if seq.len() < 2 {
                println!(
                    "{},{},n/a,{},n/a,{},n/a,n/a",
                    seq.name, declared[0] as u8, declared[1] as u8, declared[2] as u8
                );
                continue;
            }
            let derived = derive_frame_attributes(seq);
            let derived = [
                derived.fast_motion,
                derived.low_resolution,
                derived.aspect_ratio_change,
            ];
            let agreement = if declared == derived { "ok" } else { "differs" };
            println!(
                "{},{},{},{},{},{},{},{}",
                seq.name,
                declared[0] as u8,
                derived[0] as u8,
                declared[1] as u8,
                derived[1] as u8,
                declared[2] as u8,
                derived[2] as u8,
                agreement
            );
        }
    } else {
        let header: Vec<&str> = Attribute::ALL.iter().map(|a| a.abbrev()).collect();
        println!("sequence,{}", header.join(","));
        for seq in dataset.sequences() {
            println!("{},{}", seq.name, seq.attributes.to_line());
        }
    }
    EXIT_OK
}

fn cmd_cooccur(args: &CooccurArgs) -> u8 {
    let dataset = if args.census {
        match attribute_fixture() {
            Ok(ds) => ds,
            Err(e) => {
                eprintln!("error: {e}");
                return harness_exit(&e);
            }
        }
    } else {
        match load_dataset_or_exit(args.dataset.as_ref().expect("clap enforces the source")) {
            Ok(ds) => ds,
            Err(code) => return code,
        }
    };
    let csv = co_occurrence(&dataset).to_csv();
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, csv) {
                eprintln!("error: writing {}: {e}", path.display());
                return EXIT_MISSING_DATA;
            }
            eprintln!("co-occurrence written to {}", path.display());
        }
        None => print!("{csv}"),
    }
    EXIT_OK
}

/// Read a `key=value` config file into an [`EncoderConfig`], starting from
/// defaults. Blank lines and `#` comments are skipped.
fn read_encoder_config(path: &Path) -> Result<EncoderConfig, (String, u8)> {
    let body = fs::read_to_string(path)
        .map_err(|e| (format!("reading {}: {e}", path.display()), EXIT_MISSING_DATA))?;
    let mut config = EncoderConfig::default();
    for (i, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        config.apply_override(line).map_err(|e| {
            (
                format!("{} line {}: {e}", path.display(), i + 1),
                EXIT_FORMAT,
            )
        })?;
    }
    Ok(config)
}

fn cmd_encoder_check(args: &EncoderCheckArgs) -> u8 {
    let mut config = match &args.config {
        Some(path) => match read_encoder_config(path) {
            Ok(c) => c,
            Err((msg, code)) => {
                eprintln!("error: {msg}");
                return code;
            }
        },
        None => EncoderConfig::default(),
    };
    for pair in &args.set {
        if let Err(e) = config.apply_override(pair) {
            eprintln!("error: {e}");
            return EXIT_FORMAT;
        }
    }
    let report = match encoder_check(&config) {
        Ok(r) => r,
        Err(e @ EncoderError::InvalidConfig { .. }) => {
            eprintln!("error: {e}");
            return EXIT_FORMAT;
        }
    };
    for outcome in report.invariants.iter().chain(&report.gradient_checks) {
        eprintln!("{outcome}");
    }
    eprintln!(
        "fused checksum {} over γ grid of {} points",
        report.fused_checksum,
        report.gamma_sweep.len()
    );
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    }
}

fn cmd_fixtures(args: &FixturesArgs) -> u8 {
    use crate::dataset::save_dataset;
    use crate::metrics::save_tracker_result;

    let census = match attribute_fixture() {
        Ok(ds) => ds,
        Err(e) => {
            eprintln!("error: {e}");
            return harness_exit(&e);
        }
    };
    let census_dir = args.out.join("census");
    if let Err(e) = save_dataset(&census_dir, &census) {
        eprintln!("error: {e}");
        return dataset_exit(&e);
    }
    eprintln!("census dataset written ({} sequences)", census.len());

    let dataset = synthetic_dataset(args.seed, args.sequences);
    let dataset_dir = args.out.join("dataset");
    if let Err(e) = save_dataset(&dataset_dir, &dataset) {
        eprintln!("error: {e}");
        return dataset_exit(&e);
    }
    eprintln!(
        "synthetic dataset written (seed {}, {} sequences)",
        args.seed, args.sequences
    );

    let mut result_dirs = Vec::new();
    for tracker in [
        SyntheticTracker::Oracle,
        SyntheticTracker::ConstantOffset { dx: 25.0, dy: 0.0 },
        SyntheticTracker::Scaled { factor: 0.5 },
    ] {
        let result = run_tracker(&tracker, &dataset);
        let dir = args.out.join("results").join(tracker.name());
        if let Err(e) = save_tracker_result(&dir, &result) {
            eprintln!("error: {e}");
            return metrics_exit(&e);
        }
        result_dirs.push(dir);
    }
    eprintln!("tracker results written for {} trackers", result_dirs.len());

    println!("{}", census_dir.display());
    println!("{}", dataset_dir.display());
    for dir in result_dirs {
        println!("{}", dir.display());
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap_parses_and_rejects() {
        assert_eq!(parse_thread_cap(None), Ok(None));
        assert_eq!(parse_thread_cap(Some("4")), Ok(Some(4)));
        assert_eq!(parse_thread_cap(Some(" 8 ")), Ok(Some(8)));
        assert!(parse_thread_cap(Some("0")).is_err());
        assert!(parse_thread_cap(Some("many")).is_err());
        assert!(parse_thread_cap(Some("-2")).is_err());
    }

    #[test]
    fn eval_flags_parse() {
        let cli = Cli::try_parse_from([
            "camobench",
            "eval",
            "--dataset",
            "d",
            "--results",
            "r",
            "--out",
            "o",
            "--trackers",
            "a,b",
            "--averaged",
            "--per-attribute",
        ])
        .unwrap();
        match cli.command {
            Command::Eval(args) => {
                assert_eq!(args.trackers, vec!["a", "b"]);
                assert!(args.averaged);
                assert!(args.per_attribute);
                assert_eq!(args.format, FormatArg::Both);
            }
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn pooled_and_averaged_conflict() {
        let err = Cli::try_parse_from([
            "camobench", "eval", "--dataset", "d", "--results", "r", "--out", "o", "--pooled",
            "--averaged",
        ])
        .unwrap_err();
        assert_ne!(err.exit_code(), 0);
    }

    #[test]
    fn cooccur_requires_a_source() {
        assert!(Cli::try_parse_from(["camobench", "cooccur"]).is_err());
        assert!(Cli::try_parse_from(["camobench", "cooccur", "--census"]).is_ok());
        assert!(Cli::try_parse_from(["camobench", "cooccur", "--dataset", "d"]).is_ok());
        assert!(
            Cli::try_parse_from(["camobench", "cooccur", "--census", "--dataset", "d"]).is_err()
        );
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(Cli::try_parse_from(["camobench", "validate", "--dataset", "d", "--bogus"])
            .is_err());
    }

    #[test]
    fn exit_mapping_distinguishes_missing_from_malformed() {
        let io = DatasetError::Io {
            path: "x".into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "gone"),
        };
        assert_eq!(dataset_exit(&io), EXIT_MISSING_DATA);
        let parse = DatasetError::EmptyList;
        assert_eq!(dataset_exit(&parse), EXIT_FORMAT);
        let missing = MetricsError::MissingPrediction {
            sequence: "s".into(),
        };
        assert_eq!(metrics_exit(&missing), EXIT_MISSING_DATA);
    }
}
