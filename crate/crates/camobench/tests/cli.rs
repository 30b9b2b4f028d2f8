//! Black-box tests of the `camobench` binary: exit codes, stream
//! discipline (progress on stderr, machine-readable output on stdout),
//! and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_camobench")
}

fn mini_dataset() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini")
}

fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin()).args(args).output().expect("spawn camobench")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Write a one-sequence dataset in the standard directory layout and
/// return its root. `lines` become groundtruth.txt verbatim.
fn write_single_sequence_dataset(
    root: &Path,
    name: &str,
    gt_lines: &[&str],
    absence: &[u8],
) -> PathBuf {
    let dataset = root.join("dataset");
    let seq = dataset.join(name);
    fs::create_dir_all(&seq).unwrap();
    fs::write(dataset.join("list.txt"), format!("{name}\n")).unwrap();
    fs::write(seq.join("groundtruth.txt"), gt_lines.join("\n") + "\n").unwrap();
    let absence_text: String = absence.iter().map(|a| format!("{a}\n")).collect();
    fs::write(seq.join("absence.label"), absence_text).unwrap();
    fs::write(seq.join("attributes.txt"), "0,0,0,0,0,0,0,0,0,0,0,1\n").unwrap();
    fs::write(seq.join("meta.ini"), "category=test\nwidth=640\nheight=480\n").unwrap();
    dataset
}

// --- validate ---------------------------------------------------------------

#[test]
fn validate_accepts_the_bundled_mini_dataset() {
    let out = run(["validate", "--dataset", mini_dataset().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).starts_with("sequence,frame,rule,detail"));
    // The advisory about rules that need pixels goes to stderr, not into
    // the machine-readable table.
    assert!(stderr(&out).contains("not machine-checkable"));
}

#[test]
fn validate_flags_an_absent_first_frame() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = write_single_sequence_dataset(
        tmp.path(),
        "ghost-1",
        &["0,0,0,0", "10,10,40,40", "12,10,40,40"],
        &[1, 0, 0],
    );
    let out = run(["validate", "--dataset", dataset.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let table = stdout(&out);
    assert!(table.contains("rule 3"), "table was: {table}");
    assert!(table.contains("ghost-1"));
}

#[test]
fn validate_flags_out_of_frame_boxes() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = write_single_sequence_dataset(
        tmp.path(),
        "runaway-1",
        &["600,400,100,100", "610,410,100,100"],
        &[0, 0],
    );
    let out = run(["validate", "--dataset", dataset.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("box-bounds"));
}

#[test]
fn missing_dataset_directory_exits_two() {
    let out = run(["validate", "--dataset", "/nonexistent/camo-data"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_groundtruth_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = write_single_sequence_dataset(
        tmp.path(),
        "torn-1",
        &["10,20,30", "10,20,30,40"],
        &[0, 0],
    );
    let out = run(["validate", "--dataset", dataset.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("expected 4"));
}

// --- usage errors -------------------------------------------------------------

#[test]
fn unknown_flags_and_missing_subcommands_exit_three() {
    let out = run(["eval", "--bogus"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run::<[&str; 0], &str>([]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("eval"));
}

#[test]
fn invalid_thread_cap_exits_three() {
    let out = Command::new(bin())
        .args(["validate", "--dataset", mini_dataset().to_str().unwrap()])
        .env("CAMO_BENCH_THREADS", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("CAMO_BENCH_THREADS"));
}

// --- fixtures + eval pipeline ---------------------------------------------------

/// Generate the fixture tree once and hand back its root.
fn generated_fixtures(root: &Path, seed: u32, sequences: u32) -> PathBuf {
    let out_dir = root.join("fixtures");
    let out = Command::new(bin())
        .args(["fixtures", "--out"])
        .arg(&out_dir)
        .args(["--seed", &seed.to_string(), "--sequences", &sequences.to_string()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    out_dir
}

#[test]
fn generated_fixtures_validate_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = generated_fixtures(tmp.path(), 11, 6);
    for sub in ["dataset", "census"] {
        let out = run(["validate", "--dataset", fixtures.join(sub).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{sub}: {}", stderr(&out));
    }
}

#[test]
fn eval_writes_reports_and_ranks_trackers() {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = generated_fixtures(tmp.path(), 21, 6);
    let reports = tmp.path().join("reports");
    let out = Command::new(bin())
        .args(["eval", "--dataset"])
        .arg(fixtures.join("dataset"))
        .arg("--results")
        .arg(fixtures.join("results"))
        .arg("--out")
        .arg(&reports)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    // Ranking goes to stdout and to ranking.csv, identically.
    let table = stdout(&out);
    assert!(table.starts_with("rank,tracker,"), "stdout: {table}");
    let csv = fs::read_to_string(reports.join("ranking.csv")).unwrap();
    assert!(table.ends_with(&csv) || table.contains(&csv));
    // The oracle leads with a perfect precision score.
    let oracle_row = csv.lines().find(|l| l.contains("oracle")).unwrap();
    assert!(oracle_row.starts_with("1,oracle,"));

    // Every tracker gets a JSON report plus three curve CSVs.
    for tracker in ["oracle", "offset-25-0", "scaled-0.5"] {
        assert!(reports.join(format!("{tracker}.json")).is_file());
        for curve in ["precision", "normalized_precision", "success"] {
            let path = reports.join(format!("{tracker}_{curve}.csv"));
            let text = fs::read_to_string(&path).unwrap();
            assert!(text.starts_with("threshold,value"), "{path:?}");
        }
    }
}

#[test]
fn eval_with_a_missing_result_file_exits_two_and_names_the_sequence() {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = generated_fixtures(tmp.path(), 31, 5);

    // Drop one sequence's prediction file from one tracker.
    let oracle_dir = fixtures.join("results/oracle");
    let victim = fs::read_dir(&oracle_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "txt"))
        .unwrap();
    let victim_name = victim.file_stem().unwrap().to_string_lossy().into_owned();
    fs::remove_file(&victim).unwrap();

    let out = Command::new(bin())
        .args(["eval", "--dataset"])
        .arg(fixtures.join("dataset"))
        .arg("--results")
        .arg(fixtures.join("results"))
        .args(["--trackers", "oracle", "--out"])
        .arg(tmp.path().join("reports"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains(&victim_name),
        "stderr must name {victim_name}: {}",
        stderr(&out)
    );
}

#[test]
fn eval_output_is_independent_of_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = generated_fixtures(tmp.path(), 41, 6);
    let eval_with_threads = |threads: &str, out_dir: &Path| {
        let out = Command::new(bin())
            .args(["eval", "--dataset"])
            .arg(fixtures.join("dataset"))
            .arg("--results")
            .arg(fixtures.join("results"))
            .arg("--out")
            .arg(out_dir)
            .env("CAMO_BENCH_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    };
    let serial = tmp.path().join("serial");
    let parallel = tmp.path().join("parallel");
    eval_with_threads("1", &serial);
    eval_with_threads("4", &parallel);
    for entry in fs::read_dir(&serial).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(serial.join(&name)).unwrap(),
            fs::read(parallel.join(&name)).unwrap(),
            "{name:?} differs across thread counts"
        );
    }
}

// --- attributes + cooccur ---------------------------------------------------------

#[test]
fn attribute_audit_reports_na_for_single_frame_stubs() {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = generated_fixtures(tmp.path(), 51, 4);
    let out = run([
        "attributes",
        "--dataset",
        fixtures.join("census").to_str().unwrap(),
        "--audit",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = stdout(&out);
    assert!(table.starts_with("sequence,declared_fm,derived_fm"));
    // Census sequences carry flags but no usable geometry, so every
    // derived column reads n/a.
    let first_row = table.lines().nth(1).unwrap();
    assert!(first_row.contains(",n/a,"), "row: {first_row}");
}

#[test]
fn attribute_table_lists_declared_flags() {
    let out = run([
        "attributes",
        "--dataset",
        mini_dataset().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = stdout(&out);
    assert!(table.starts_with("sequence,IV,SV,DEF,MB,FM,OV,LR,POC,ROT,FOC,ARC,BC"));
    assert!(table.contains("snake-3,0,0,0,0,1,0,1,0,0,0,1,1"));
}

#[test]
fn cooccur_census_prints_the_reference_counts() {
    let out = run(["cooccur", "--census"]);
    assert_eq!(out.status.code(), Some(0));
    let table = stdout(&out);
    assert!(table.starts_with("attribute,IV,SV,DEF,MB,FM,OV,LR,POC,ROT,FOC,ARC"));
    let mb_row = table.lines().find(|l| l.starts_with("MB,")).unwrap();
    assert_eq!(mb_row, "MB,1,12,32,72,12,19,10,25,8,4,6");
}

#[test]
fn cooccur_writes_csv_to_a_file_when_asked() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("matrix.csv");
    let out = Command::new(bin())
        .args(["cooccur", "--census", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() == 12); // header + 11 rows
}

// --- encoder-check ------------------------------------------------------------------

#[test]
fn encoder_check_emits_a_json_report_on_success() {
    let out = run([
        "encoder-check",
        "--set",
        "n_blocks=3",
        "--set",
        "embed_dim=6",
        "--set",
        "input_dim=4",
        "--set",
        "template_tokens=2",
        "--set",
        "search_tokens=6",
        "--set",
        "prune_at=1,2",
        "--set",
        "mlp_hidden=2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("stdout is JSON");
    let sweep = report["gamma_sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 10);
    let mut checksums: Vec<&str> = sweep
        .iter()
        .map(|p| p["checksum"].as_str().unwrap())
        .collect();
    checksums.sort_unstable();
    checksums.dedup();
    assert_eq!(checksums.len(), 10, "blend checksums must be distinct");
}

#[test]
fn encoder_check_rejects_an_out_of_range_blend_weight() {
    let out = run(["encoder-check", "--set", "gamma=1.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("gamma"));
}

#[test]
fn encoder_check_reads_key_value_config_files() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("encoder.conf");
    fs::write(
        &path,
        "# compact probe\nn_blocks = 2\nembed_dim = 4\ninput_dim = 3\ntemplate_tokens = 1\nsearch_tokens = 4\nprune_at = 1\nmlp_hidden = 2\n",
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["encoder-check", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let bad = tmp.path().join("broken.conf");
    fs::write(&bad, "n_blocks = billions\n").unwrap();
    let out = Command::new(bin())
        .args(["encoder-check", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 1"));
}
