use std::path::Path;
use std::process::{Command, Output};

use ljb::cli::ProblemSpec;
use serde_json::Value;

const EX1: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/ex1.json");

fn ljb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ljb")).args(args).output().unwrap()
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ex1_runs_every_task() {
    let out = ljb(&["run", EX1]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = report.to_string();
    for task in ["verify", "reduce-subalgebra", "t-reduce", "equivalence", "states", "gns", "purity"] {
        assert!(text.contains(task), "missing {task}");
    }
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("t-reduce: pass (D 1, O 2, quotient 1, Dirac classes 1)"), "{summary}");
    assert!(summary.contains("dim S 4 of 4"), "{summary}");
}

#[test]
fn report_is_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = ljb(&["run", EX1, "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn spec_round_trips() {
    let text = std::fs::read_to_string(EX1).unwrap();
    let spec = ProblemSpec::parse(&text).unwrap();
    let again = ProblemSpec::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, again);
}

#[test]
fn parameters_off_the_curve_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(EX1).unwrap().replace("\"lambda\": 0.5", "\"lambda\": 1.0");
    let path = write_spec(dir.path(), "bad.json", &text);
    assert_eq!(ljb(&["run", &path]).status.code(), Some(2));
    assert_eq!(ljb(&["run", "/nonexistent/spec.json"]).status.code(), Some(2));
    let path = write_spec(dir.path(), "garbage.json", "{ not json");
    assert_eq!(ljb(&["run", &path]).status.code(), Some(2));
}

#[test]
fn missing_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "s.json", r#"{"n": 2, "algebra": "full", "tasks": ["reduce-ideal"]}"#);
    assert_eq!(ljb(&["run", &path]).status.code(), Some(3));
}

#[test]
fn empty_task_list_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "s.json", r#"{"n": 2, "algebra": "full", "tasks": []}"#);
    let out = ljb(&["run", &path]);
    assert_eq!(out.status.code(), Some(0));
    let _: Value = serde_json::from_slice(&out.stdout).unwrap();
}

#[test]
fn certify_reports_summary() {
    let out = ljb(&["certify", "axioms", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("axioms: 0/0 passed"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let out = ljb(&["certify", "thm8.1", "--count", "3", "--seed", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(summary["passed"], 3);
}

#[test]
fn invalid_tolerance_exit_2() {
    assert_eq!(ljb(&["--tol", "-1", "certify", "axioms", "--count", "0"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ljb"))
        .args(["certify", "gns", "--count", "2"])
        .env("LJB_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
