use std::fs;
use std::process::{Command, Output};

use magd::trace::read_trace_csv;

fn magd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magd"))
        .args(args)
        .output()
        .expect("spawn magd")
}

#[test]
fn usage_error_exits_with_one() {
    let out = magd(&[
        "run",
        "--objective",
        "quadratic",
        "--points",
        "0,0",
        "--lambda",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--lambda"));

    let out = magd(&["run", "--objective", "quadratic", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let out = magd(&["run", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--step-mode"));
}

#[test]
fn divergence_exits_with_two_and_reports_agent() {
    let out = magd(&[
        "run",
        "--objective",
        "quadratic",
        "--points",
        "10,10;0,0",
        "--lambda",
        "0",
        "--beta",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("diverged"), "{text}");
    assert!(text.contains("failing agent"), "{text}");
    assert!(text.contains("last finite iteration"), "{text}");
}

#[test]
fn single_run_summary_has_no_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.txt");
    let out = magd(&[
        "run",
        "--preset",
        "exp1",
        "--max-iter",
        "500",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&summary).unwrap();
    assert!(text.starts_with("objective: quadratic\n"));
    assert!(text.contains("stop reason             consensus"));
    assert!(!text.contains("no protocol"));
}

#[test]
fn compare_writes_both_traces() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("exp2.csv");
    let out = magd(&[
        "run",
        "--preset",
        "exp2",
        "--compare",
        "--max-iter",
        "200",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let with = read_trace_csv(&trace).unwrap();
    let without = read_trace_csv(&dir.path().join("exp2.no_protocol.csv")).unwrap();
    assert_eq!(with.len(), 202 * 3);
    assert_eq!(without.len(), 202 * 3);
    // identical starting rows, different dynamics
    assert_eq!(with[..3], without[..3]);
    assert_ne!(with[3..6], without[3..6]);
}

#[test]
fn random_initialization_backtracking_run() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("dw.csv");
    let args = [
        "run",
        "--objective",
        "doublewell",
        "--init",
        "random",
        "--agents",
        "5",
        "--seed",
        "42",
        "--box",
        "-3",
        "3",
        "--step-mode",
        "backtracking",
        "--max-iter",
        "100",
        "--trace",
        trace.to_str().unwrap(),
    ];
    assert_eq!(magd(&args).status.code(), Some(0));
    let first = fs::read(&trace).unwrap();
    assert_eq!(magd(&args).status.code(), Some(0));
    assert_eq!(fs::read(&trace).unwrap(), first);

    let rows = read_trace_csv(&trace).unwrap();
    assert_eq!(rows.len() % 5, 0);
    let best: Vec<f64> = rows.chunks(5).map(|block| block[0].best_f).collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn unwritable_trace_path_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("t.csv");
    let out = magd(&["run", "--preset", "exp1", "--trace", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t.csv"));
}
