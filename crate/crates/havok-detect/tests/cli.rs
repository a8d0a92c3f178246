//! Command-line round trips and exit-code contracts.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_havok-detect"))
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let output = bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

#[test]
fn synth_detect_round_trip_scores_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = run_in(
        dir.path(),
        &[
            "synth", "calcium", "--n", "7200", "--rate", "0.3", "--noise", "0.1", "--seed", "5",
            "--out", "calcium.csv", "--truth-out", "truth.csv",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("wrote 7200 samples"), "stdout: {stdout}");
    assert!(dir.path().join("calcium.csv").exists());
    assert!(dir.path().join("truth.csv").exists());

    let (code, stdout, stderr) = run_in(
        dir.path(),
        &[
            "detect", "--input", "calcium.csv", "--ts", "0.0167", "--auto",
            "--truth-column", "truth", "--out", "report.json", "--dump-traces", "traces",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("error ratio vs truth column"), "stdout: {stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert!(report["events"].as_array().is_some_and(|e| !e.is_empty()));
    for file in [
        "traces/decision_trace.csv",
        "traces/singular_spectrum.csv",
        "traces/histogram_fit.csv",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let (code, _, stderr) = run_in(
            dir.path(),
            &["synth", "mud", "--slots", "50", "--seed", "7", "--out", name],
        );
        assert_eq!(code, 0, "stderr: {stderr}");
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ecg_truth_lists_requested_windows() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run_in(
        dir.path(),
        &[
            "synth", "ecg", "--windows", "3", "--out", "ecg.csv", "--truth-out", "ecg_truth.csv",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let truth = std::fs::read_to_string(dir.path().join("ecg_truth.csv")).unwrap();
    let windows = truth
        .lines()
        .skip_while(|l| *l != "window_start,window_end")
        .skip(1)
        .take_while(|l| l.contains(','))
        .count();
    assert_eq!(windows, 3, "truth file: {truth}");
}

#[test]
fn missing_input_exits_2_without_panicking() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run_in(
        dir.path(),
        &["detect", "--input", "missing.csv", "--ts", "0.1"],
    );
    assert_eq!(code, 2);
    assert!(stderr.contains("missing.csv"), "stderr: {stderr}");
    assert!(!stderr.contains("panicked"), "stderr: {stderr}");
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.csv"), "1.0\n2.0\n3.0\n").unwrap();
    let (code, _, stderr) = run_in(
        dir.path(),
        &["detect", "--input", "tiny.csv", "--ts", "0.1", "--M", "40"],
    );
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("too short"), "stderr: {stderr}");
}

#[test]
fn malformed_rows_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "value\n1.0\n2.0\noops\n").unwrap();
    let (code, _, stderr) = run_in(
        dir.path(),
        &["detect", "--input", "bad.csv", "--ts", "0.1"],
    );
    assert_eq!(code, 2);
    assert!(stderr.contains("line 4"), "stderr: {stderr}");
}

#[test]
fn bench_writes_a_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = run_in(
        dir.path(),
        &[
            "bench", "mud", "--sweep", "drift=0.5,1.0", "--trials", "2", "--jobs", "2",
            "--out", "sweep.csv",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("drift,mean_ber"), "stdout: {stdout}");
    let table = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 3, "table: {table}");

    // single-point sweep gives a single row
    let (code, stdout, _) = run_in(
        dir.path(),
        &["bench", "calcium", "--sweep", "noise=0.1", "--trials", "1"],
    );
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 2, "stdout: {stdout}");
}

#[test]
fn mud_round_trip_with_matched_filter_file() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run_in(
        dir.path(),
        &[
            "synth", "mud", "--slots", "60", "--seed", "2", "--out", "mud.csv",
            "--pulse-out", "pulse.csv",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let (code, stdout, stderr) = run_in(
        dir.path(),
        &[
            "detect", "--input", "mud.csv", "--ts", "0.1", "--M", "20", "--r", "2",
            "--robust", "--matched-filter", "pulse.csv", "--L", "16",
            "--min-separation", "20", "--truth-column", "truth",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("M=20 r=2"), "stdout: {stdout}");
}
