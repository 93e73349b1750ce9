//! End-to-end checks of the `hardy` binary: verbs, outputs and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("suite.json");
    fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"{
  "seed": 7,
  "n_tests": 20,
  "cases": [
    {
      "id": "hardy-e3",
      "kind": "hardy",
      "model": { "kind": "euclidean-radial", "dim": 3 },
      "weight": "power:beta=-1",
      "range": { "lo": 0.01, "hi": 100.0, "open_lo": true },
      "n": 400
    }
  ],
  "capacity": [
    { "id": "cap-e3", "model": { "kind": "euclidean-radial", "dim": 3 }, "p": 2.0, "a": 1.0, "expect": "p-hyperbolic" }
  ]
}"#;

#[test]
fn list_names_the_catalog() {
    let out = hardy(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.trim_start().starts_with("hardy ")));
    assert!(text
        .lines()
        .any(|l| l.trim_start().starts_with("weighted-hardy ")));
    assert!(text.contains("euclidean-radial"));
}

#[test]
fn missing_config_is_a_config_error() {
    let out = hardy(&["run", "/nonexistent/suite.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "{ \"seed\": 1, \"cases\": [ { \"id\": ");
    let out = hardy(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn small_suite_passes_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let out = hardy(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out_dir = dir.path().join("out");
    for f in ["report.json", "cases.csv", "capacity.csv"] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
}

#[test]
fn violated_hypothesis_is_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL.replace("power:beta=-1", "power:beta=2");
    let path = write_config(dir.path(), &body);
    let out = hardy(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    assert!(report.contains("hypothesis-failed"));
}

#[test]
fn parabolic_green_profile_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL
        .replace(
            "\"dim\": 3 },\n      \"weight\": \"power:beta=-1\"",
            "\"dim\": 2 },\n      \"weight\": \"green\"",
        )
        .replace("\"n\": 400", "\"n\": 400, \"params\": { \"p\": 2.0 }");
    assert!(body.contains("green"));
    let path = write_config(dir.path(), &body);
    let out = hardy(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("hardy-e3"));
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("seeded");
    let out = hardy(&[
        "run",
        path.to_str().unwrap(),
        "--seed",
        "99",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"seed\": 99"));
}

#[test]
fn emit_round_trips_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    assert_eq!(code(&hardy(&["run", path.to_str().unwrap()])), 0);
    let report = dir.path().join("out/report.json");
    let original = fs::read(&report).unwrap();

    let json_dir = dir.path().join("json");
    let out = hardy(&[
        "emit",
        report.to_str().unwrap(),
        "--format",
        "json",
        "--out-dir",
        json_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(json_dir.join("report.json")).unwrap(), original);

    let csv_dir = dir.path().join("csv");
    let out = hardy(&[
        "emit",
        report.to_str().unwrap(),
        "--format",
        "csv",
        "--out-dir",
        csv_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let cases = fs::read_to_string(csv_dir.join("cases.csv")).unwrap();
    assert!(cases.starts_with("case_id,"));
    assert!(cases.contains("hardy-e3"));
}
