//! End-to-end tests of the `bethe-twist` binary: exit-code contract,
//! report determinism, and the documented outputs of each subcommand.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bethe-twist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).expect("write config");
    path.to_string_lossy().into_owned()
}

const HOMOGENEOUS_L2: &str = r#"{
  "model": {"length": 2, "c": "1", "inhomogeneities": ["0"], "homogeneous": true},
  "twist": [["1", "1"], ["1", "2"]],
  "mode": "float",
  "seed": 7,
  "tolerance": 1e-10,
  "magnons": 1
}"#;

#[test]
fn verify_identities_suite_exits_zero_and_prints_summary() {
    let out = run(&["verify", "--suite", "identities"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("yang-baxter"), "summary lists checks: {text}");
    assert!(text.contains("0 failed"), "no failures: {text}");
}

#[test]
fn verify_report_is_byte_identical_for_same_config_and_seed() {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "verify",
            "--suite",
            "identities",
            "--report",
            path.to_str().expect("utf8 path"),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    let bytes_a = std::fs::read(&a).expect("report a");
    let bytes_b = std::fs::read(&b).expect("report b");
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "same config and seed must reproduce bytes");
}

#[test]
fn report_json_is_sorted_by_name_with_string_residuals() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--suite",
        "twist",
        "--report",
        path.to_str().expect("utf8 path"),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&path).expect("report")).expect("valid json");
    let checks = doc.as_array().expect("top-level array");
    assert!(!checks.is_empty());
    let names: Vec<&str> = checks
        .iter()
        .map(|c| c["name"].as_str().expect("name string"))
        .collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted, "checks sorted by name");
    for check in checks {
        assert!(check["residual"].is_string(), "residuals serialize as strings");
        assert!(check["pass"].is_boolean());
        assert!(check.get("wall_ms").is_none(), "no wall time in the report");
    }
}

#[test]
fn spectrum_of_homogeneous_length_two_chain_at_one_is_3_5_5_5() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), "homog.json", HOMOGENEOUS_L2);
    let out = run(&["spectrum", "--config", &config, "--point", "1.0"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: Vec<[f64; 2]> = serde_json::from_str(&stdout(&out)).expect("json pairs");
    assert_eq!(doc.len(), 4);
    let expected = [3.0, 5.0, 5.0, 5.0];
    for (got, want) in doc.iter().zip(expected) {
        assert!((got[0] - want).abs() < 1e-9, "re {} vs {want}", got[0]);
        assert!(got[1].abs() < 1e-9, "imaginary part {}", got[1]);
    }
}

#[test]
fn solve_bethe_homogeneous_length_two_finds_minus_one_half() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), "homog.json", HOMOGENEOUS_L2);
    let out = run(&["solve-bethe", "--config", &config]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    let accepted = doc["accepted"].as_array().expect("accepted array");
    assert_eq!(accepted.len(), 1, "single one-magnon solution");
    let root = accepted[0]["roots"][0].as_array().expect("pair");
    assert!((root[0].as_f64().expect("re") + 0.5).abs() < 1e-9);
    assert!(root[1].as_f64().expect("im").abs() < 1e-9);
    let eigenvalue = accepted[0]["eigenvalue"].as_array().expect("pair");
    assert!((eigenvalue[0].as_f64().expect("re") - 3.0).abs() < 1e-9);
}

#[test]
fn expand_prints_one_row_per_three_way_partition() {
    let out = run(&["expand", "--magnons", "2"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let rows = text
        .lines()
        .filter(|l| l.starts_with("u_") || l.starts_with("- "))
        .count();
    assert_eq!(rows, 9, "3^2 partition rows for two parameters: {text}");
    assert!(text.contains("k11^"), "twist powers column: {text}");
}

#[test]
fn global_overrides_change_the_model() {
    let out = run(&["spectrum", "--length", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: Vec<[f64; 2]> = serde_json::from_str(&stdout(&out)).expect("json pairs");
    assert_eq!(doc.len(), 8, "2^3 eigenvalues after --length 3");
}

#[test]
fn failing_suite_exits_one() {
    // An absurdly small float tolerance turns roundoff into failures.
    let out = run(&[
        "verify",
        "--suite",
        "rtt",
        "--mode",
        "float",
        "--tolerance",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"), "summary marks failures");
}

#[test]
fn config_errors_name_the_offending_field_and_exit_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{
  "model": {"length": 2, "c": "1", "inhomogeneities": ["0", "0"], "homogeneous": true},
  "twist": [["1", "1"], ["1", "2"]],
  "mode": "exact",
  "seed": 1,
  "tolerance": 1e-10
}"#,
    );
    let out = run(&["verify", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("model.inhomogeneities"),
        "error names the field: {}",
        stderr(&out)
    );

    let out = run(&["verify", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));

    let garbage = write_config(dir.path(), "garbage.json", "not json at all");
    let out = run(&["verify", "--config", &garbage]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("garbage.json"),
        "error names the file: {}",
        stderr(&out)
    );
}

#[test]
fn invalid_flag_values_exit_two() {
    let out = run(&["verify", "--mode", "symbolic"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("expected 'exact' or 'float'"));

    let out = run(&["verify", "--suite", "unheard-of"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unheard-of"), "stderr: {}", stderr(&out));
}

#[test]
fn singular_twist_is_rejected() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        "singular.json",
        r#"{
  "model": {"length": 2, "c": "1", "inhomogeneities": ["0", "1/7"], "homogeneous": false},
  "twist": [["1", "1"], ["1", "1"]],
  "mode": "exact",
  "seed": 1,
  "tolerance": 1e-10
}"#,
    );
    let out = run(&["verify", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("twist"), "stderr: {}", stderr(&out));
}
