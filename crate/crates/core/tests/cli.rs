use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sspec"))
        .args(args)
        .env("SSPEC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

fn spheres(v: &Value) -> Vec<(f64, f64)> {
    v["result"]["spheres"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["re"].as_f64().unwrap(), s["rad"].as_f64().unwrap()))
        .collect()
}

#[test]
fn example_a_spectrum() {
    let v = json(&sspec(&["spectrum", &data("example-A.json")]));
    assert_eq!(v["config"]["command"], "spectrum");
    let s = spheres(&v);
    assert_eq!(s.len(), 1);
    assert!(s[0].0.abs() < 1e-9 && (s[0].1 - 1.0).abs() < 1e-9);
}

#[test]
fn example_b_spectrum() {
    let v = json(&sspec(&["spectrum", &data("example-B.json")]));
    assert_eq!(spheres(&v).len(), 3);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "identity-e1", "--trials", "1000", "--seed", "7"];
    let (a, b) = (sspec(&args), sspec(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["result"]["pass"], true);
}

#[test]
fn verify_suites() {
    let v = json(&sspec(&[
        "verify",
        "shift-boundary",
        "--q",
        "0.5",
        "--n",
        "10",
    ]));
    assert_eq!(v["result"]["passed"], 11);
    let v = json(&sspec(&[
        "verify",
        "sum",
        "--algebra",
        "block",
        "--seed",
        "1",
    ]));
    assert_eq!(v["result"]["failed"], 0);
}

#[test]
fn csv_carries_config_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let status = sspec(&[
        "scan",
        &data("example-A.json"),
        "--grid",
        "-1,1,1.5,0.25",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    let first = text.lines().next().unwrap();
    let header: Value = serde_json::from_str(first.strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(header["command"], "scan");
    assert!(text.lines().count() > 2);
}

#[test]
fn shift_commands() {
    let v = json(&sspec(&[
        "shift",
        "index",
        "--op-file",
        &data("unilateral-shift.json"),
    ]));
    assert_eq!(v["result"]["index"], -1);
    let v = json(&sspec(&["shift", "index", "--op", "R", "--q", "0"]));
    assert_eq!(v["result"]["dimKer"], 2);
    let v = json(&sspec(&["shift", "norm", "--op", "R"]));
    assert!((v["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 2, \"entries\": [").unwrap();
    assert_eq!(
        sspec(&["spectrum", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        sspec(&["spectrum", "/nonexistent/matrix.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sspec(&["no-such-command"]).status.code(), Some(2));
    // finite rank on an infinite-dimensional space is never Fredholm
    let out = sspec(&["shift", "index", "--op", "T"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}
