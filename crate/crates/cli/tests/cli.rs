use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn hyptype(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyptype"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn spec_file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_nikolov_andreev() {
    let out = hyptype(&[
        "eval", "--family", "na", "--x", "1", "--y", "3", "--fx", "1", "--fy", "3", "--d", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["result"]["rho"].as_f64().unwrap() - 1.098612).abs() < 1e-6);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["tool"], "hyptype");
    assert!((v["certified_bounds"]["go"].as_f64().unwrap() - 24f64.ln() / 4.0).abs() < 1e-15);
    assert_eq!(v["config"]["family"], "na");
}

#[test]
fn eval_derives_distance_from_points() {
    let out = hyptype(&[
        "eval", "--family", "go", "--x", "0,0", "--y", "3,4", "--fx", "5", "--fy", "5",
    ]);
    let v = json(&out);
    assert_eq!(v["config"]["d"], 5.0);
    assert!((v["result"]["rho"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        hyptype(&["eval", "--family", "xyz", "--fx", "1", "--fy", "1", "--d", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyptype(&["eval", "--family", "go", "--fx", "1", "--fy", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyptype(&["eval", "--family", "go", "--fx", "0", "--fy", "1", "--d", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyptype(&["delta", "--family", "go", "--space", "/nonexistent.json"])
            .status
            .code(),
        Some(1)
    );
    let help = hyptype(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("Exit status"));
}

#[test]
fn malformed_spec_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = spec_file(
        &dir,
        "bad.json",
        "{\n  \"kind\": \"halfplane_lattice\",\n  \"nx\": \"three\"\n}",
    );
    let out = hyptype(&["delta", "--family", "go", "--space", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("at line") && err.contains("bad.json"), "{err}");
    let inside = spec_file(
        &dir,
        "inside.json",
        r#"{"kind": "euclidean_cloud", "points": [[0.5, 0]], "obstacle": [{"type": "disc", "center": [0, 0], "radius": 1}]}"#,
    );
    let out = hyptype(&["audit", "--family", "go", "--space", &inside]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("obstacle"));
}

#[test]
fn delta_on_lattice_stays_below_bound() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        &dir,
        "lattice.json",
        r#"{"kind": "halfplane_lattice", "nx": 5, "ny": 6}"#,
    );
    let out = hyptype(&[
        "delta",
        "--family",
        "go",
        "--space",
        &spec,
        "--mode",
        "exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["estimate"]["delta_hat"].as_f64().unwrap() <= 0.794482);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["witness_labels"].as_array().unwrap().len(), 4);
}

#[test]
fn audit_flags_small_c_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        &dir,
        "disk.json",
        r#"{"kind": "unit_disk", "radii": [0.99], "angular": 2}"#,
    );
    let out = hyptype(&["audit", "--family", "dhv", "--c", "1", "--space", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "violation");
    let out = hyptype(&["audit", "--family", "dhv", "--c", "2", "--space", &spec]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn custom_non_lipschitz_weights() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        &dir,
        "custom.json",
        r#"{"kind": "halfplane_lattice", "nx": 2, "ny": 3, "spacing": 1,
            "weight_source": {"type": "custom_table", "values": [1, 100, 0.01, 5, 0.2, 40]}}"#,
    );
    let v = json(&hyptype(&["delta", "--family", "na", "--space", &spec]));
    assert_eq!(v["result"]["lipschitz_certified"], false);
    assert_eq!(v["result"]["estimate"]["bound_applies"], false);
    let v = json(&hyptype(&["delta", "--family", "ibr", "--space", &spec]));
    assert_eq!(v["result"]["estimate"]["bound_applies"], true);
    assert_eq!(v["status"], "ok");
    let out = hyptype(&["dilatation", "--family", "ibr", "--space", &spec]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dilatation_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        &dir,
        "p.json",
        r#"{"kind": "punctured_plane", "radii": [1], "angular": 4}"#,
    );
    let out = hyptype(&[
        "dilatation",
        "--family",
        "go",
        "--space",
        &spec,
        "--format",
        "csv",
        "--r-grid",
        "0.1,0.001",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,H_hat,H_env");
    assert_eq!(lines.len(), 3);
    let row: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 0.001);
    assert!((row[1] - 1.0).abs() < 0.01 && row[1] <= row[2]);
    let out = hyptype(&[
        "delta", "--family", "go", "--space", &spec, "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn counterexample_exit_reflects_theory() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        &dir,
        "disk.json",
        r#"{"kind": "unit_disk", "radii": [0.5], "angular": 4}"#,
    );
    let out = hyptype(&[
        "counterexample",
        "--family",
        "dhv",
        "--c",
        "1.99",
        "--space",
        &spec,
        "--samples",
        "5000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "found");
    // Too small a budget to reach radii close enough to 1.
    let out = hyptype(&[
        "counterexample",
        "--family",
        "dhv",
        "--c",
        "1.99",
        "--space",
        &spec,
        "--samples",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "not_found");
    let out = hyptype(&["counterexample", "--family", "go", "--space", &spec]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = [
        "eval", "--family", "ibr", "--fx", "1", "--fy", "2", "--d", "1",
    ];
    let stdout = hyptype(&args).stdout;
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert_eq!(hyptype(&with_out).status.code(), Some(0));
    assert_eq!(fs::read(&path).unwrap(), stdout);
}
