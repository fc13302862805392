use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qspline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = qspline(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

/// On [0, 1] the natural spline through (0,0), (1,1), (2,0) is 3x/2 - x^3/2.
#[test]
fn three_point_natural_fit_then_eval() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "data.csv", "x,y\n0,0\n1,1\n2,0\n");
    let fit_path = dir.path().join("fit.json");
    let fit_str = fit_path.to_str().unwrap();
    let summary = json_ok(&[
        "fit",
        "--input",
        &data,
        "--boundary",
        "natural",
        "--phase-bits",
        "10",
        "--seed",
        "1",
        "--mode",
        "exact",
        "--out",
        fit_str,
    ]);
    assert!(summary["classical_fidelity"].as_f64().unwrap() > 0.999);
    let stored: Value = serde_json::from_str(&fs::read_to_string(&fit_path).unwrap()).unwrap();
    assert_eq!(stored["boundary"]["type"], "second_derivative");

    let e = json_ok(&["eval", "--fit", fit_str, "--at", "0.5"]);
    assert!((e["S"].as_f64().unwrap() - 0.6875).abs() < 0.02, "{e}");
    assert!((e["S1"].as_f64().unwrap() - 1.125).abs() < 0.05, "{e}");
    assert!((e["S2"].as_f64().unwrap() + 1.5).abs() < 0.05, "{e}");
    assert!(e["error_budget"]["S"].as_f64().unwrap() > 0.0);

    let out = qspline(&["eval", "--fit", fit_str, "--at", "7"]);
    assert_eq!(out.status.code(), Some(2), "outside the domain is an input error");
}

#[test]
fn clamped_fit_in_shots_mode() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "data.csv", "x,y\n0,0\n0.5,0.4\n1.5,1\n2,0.2\n3,-0.5\n");
    let s = json_ok(&[
        "fit",
        "--input",
        &data,
        "--boundary",
        "clamped",
        "--f0p",
        "1",
        "--fnp",
        "-0.5",
        "--phase-bits",
        "8",
        "--mode",
        "shots",
        "--seed",
        "3",
    ]);
    assert!(s["classical_fidelity"].as_f64().unwrap() > 0.99);
    assert!(s["success_prob"].as_f64().unwrap() > 0.0);
    assert_eq!(s["boundary"], "type1");
}

#[test]
fn mismatched_boundary_values_are_rejected() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "data.csv", "x,y\n0,0\n1,1\n2,0\n");
    let out = qspline(&["fit", "--input", &data, "--boundary", "type1", "--f0pp", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = write(dir.path(), "bad.csv", "x,y\n0,0\n0,1\n");
    assert_eq!(
        qspline(&["fit", "--input", &bad, "--boundary", "natural"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn qpe_demo_table() {
    let v = json_ok(&["qpe-demo", "--theta", "0.333333", "--bits", "3"]);
    let rows = v["outcomes"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(v["most_likely"], 3);
    let total: f64 = rows.iter().map(|r| r["probability"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(v["bracket_probability"].as_f64().unwrap() >= 4.0 / std::f64::consts::PI.powi(2));

    let exact = json_ok(&["qpe-demo", "--theta", "0.625", "--bits", "3"]);
    assert!((exact["outcomes"][5]["probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let text = qspline(&["qpe-demo", "--theta", "0.2", "--bits", "2", "--format", "text"]);
    assert!(text.status.success());
    assert!(String::from_utf8(text.stdout).unwrap().contains("probability"));
}

#[test]
fn floats_have_seventeen_significant_digits() {
    let out = qspline(&["qpe-demo", "--theta", "0.1", "--bits", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"theta\"")).unwrap();
    assert!(line.contains("1.0000000000000001e-1"), "{line}");
}

#[test]
fn prep_reports_cost() {
    let dir = TempDir::new().unwrap();
    let v = write(dir.path(), "v.csv", "1\n-0.001\n0.25\n0\n3\n");
    let b = json_ok(&["prep", "--vector", &v, "--method", "binned"]);
    assert!((b["kappa"].as_f64().unwrap() - 3000.0).abs() < 1e-9);
    assert_eq!(b["q"], 12);
    assert!(b["fidelity"].as_f64().unwrap() > 1.0 - 1e-10);
    let f = json_ok(&["prep", "--vector", &v, "--method", "flat"]);
    assert_eq!(f["q"], 1);
    let s = f["success_prob"].as_f64().unwrap();
    let norm2 = 1.0 + 1e-6 + 0.0625 + 9.0;
    let one = 1.0 + 0.001 + 0.25 + 3.0;
    assert!((s - norm2 / (one * one)).abs() < 1e-10);
}

#[test]
fn conditioning_sweep_and_single() {
    let v = json_ok(&[
        "conditioning",
        "--sweep",
        "--sizes",
        "8..40",
        "--trials",
        "30",
        "--seed",
        "5",
    ]);
    assert_eq!(v["bound_4sqrt2_ok"], true);
    assert!(v["max_kappa"].as_f64().unwrap() <= 4.0 * 2f64.sqrt());
    assert_eq!(v["report"]["systems"], 30);

    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "data.csv", "x,y\n0,1\n1,0\n2,1\n4,2\n5,1\n");
    let s = json_ok(&["conditioning", "--input", &data, "--boundary", "periodic"]);
    assert_eq!(s["report"]["size"], 4);

    assert_eq!(qspline(&["conditioning"]).status.code(), Some(2));
}

#[test]
fn hhl_solve_hermitian_and_general() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.csv", "2,1,0\n1,3,1\n0,1,2\n");
    let b = write(dir.path(), "b.csv", "1\n0\n-1\n");
    let v = json_ok(&["hhl-solve", "--matrix", &a, "--rhs", &b, "--phase-bits", "10"]);
    assert_eq!(v["hermitian"], true);
    assert!(v["fidelity_vs_direct"].as_f64().unwrap() > 0.99, "{v}");
    let ratio = v["direct_norm_ratio"].as_f64().unwrap();
    assert!(
        (v["norm_estimate"].as_f64().unwrap() - ratio).abs() < 0.05 * ratio,
        "{v}"
    );

    let g = write(dir.path(), "g.csv", "3,1\n0,2\n");
    let gb = write(dir.path(), "gb.csv", "1,1\n");
    let v = json_ok(&[
        "hhl-solve",
        "--matrix",
        &g,
        "--rhs",
        &gb,
        "--phase-bits",
        "9",
        "--min-fidelity",
        "0.95",
    ]);
    assert_eq!(v["hermitian"], false);

    let out = qspline(&[
        "hhl-solve",
        "--matrix",
        &g,
        "--rhs",
        &gb,
        "--phase-bits",
        "2",
        "--min-fidelity",
        "0.999999",
    ]);
    assert_eq!(out.status.code(), Some(1), "failed check exits 1");
}
