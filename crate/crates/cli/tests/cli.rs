use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn finsler(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .current_dir(dir)
        .env_remove("FINSLER_REPORT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn summary_max(report: &Value, name: &str) -> f64 {
    report["summary"][name]["max"].as_f64().unwrap_or_else(|| panic!("no summary for {name}"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn euclidean_properties_scan_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "e.json",
        r#"{"metric": {"kind": "euclidean", "params": {"n": 2}}, "checks": ["properties"], "samples": {"count": 10}}"#,
    );
    let out = finsler(&["scan", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["per_point"].as_array().unwrap().len(), 10);
    for (name, s) in r["summary"].as_object().unwrap() {
        if name != "min_eigenvalue" {
            assert!(s["max"].as_f64().unwrap() <= 1e-12, "{name}: {s}");
        }
    }
}

#[test]
fn warped_sphere_einstein_scan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s5.json",
        r#"{"metric": {"kind": "s5_example", "params": {"c": 2}}, "checks": ["einstein"],
            "tolerances": {"scal_error": 1e-5}, "expect": {"scal": 6}}"#,
    );
    let out = finsler(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let mean = json(&out)["summary"]["scal"]["mean"].as_f64().unwrap();
    assert!((mean - 6.0).abs() <= 1e-5, "{mean}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let randers = write_config(dir.path(), "r.json", r#"{"metric": {"kind": "randers", "params": {"b": [1.2, 0]}}}"#);
    let out = finsler(&["scan", &randers], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Randers requires ‖b‖<1"));

    let unknown = write_config(dir.path(), "u.json", r#"{"metric": {"kind": "funk"}}"#);
    assert_eq!(finsler(&["scan", &unknown], dir.path()).status.code(), Some(2));
    let malformed = write_config(dir.path(), "m.json", r#"{"metric": {"kind": "sphere2"}, "extra": 1}"#);
    assert_eq!(finsler(&["scan", &malformed], dir.path()).status.code(), Some(2));
    assert_eq!(finsler(&["scan", "missing.json"], dir.path()).status.code(), Some(2));

    let out = finsler(
        &["einstein-check", "--metric", "sphere2", "--output", "/nonexistent-dir/r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write report"));
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = finsler(&["einstein-check", "--metric", "sphere2", "--expect-scal", "3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scal_error"));
    assert_eq!(json(&out)["pass"], Value::Bool(false));
}

#[test]
fn cylinder_check_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = finsler(
        &["cylinder-check", "--phi", "cos+c", "--c", "2", "--eps", "3.14", "--m2", "sphere2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(summary_max(&json(&out), "hessian_residual") <= 1e-6);
}

#[test]
fn constant_conformal_factor_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = finsler(&["conformal-check", "--metric", "euclidean3", "--u", "const:1.0"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary_max(&json(&out), "ee9_residual"), 0.0);
}

#[test]
fn sphere_scal_column_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = finsler(&["einstein-check", "--metric", "sphere2", "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let col = rdr.headers().unwrap().iter().position(|h| h == "scal").unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let scal: f64 = rec.unwrap()[col].parse().unwrap();
        assert!((scal - 2.0).abs() <= 1e-6);
        rows += 1;
    }
    assert_eq!(rows, 20);
}

#[test]
fn warped_and_oracle_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = finsler(&["warped-check", "--metric", "s5_example", "--param", "c=2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = finsler(&["oracle-diff", "--metric", "hyperbolic2", "--samples", "10"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(summary_max(&json(&out), "oracle_riemann") <= 1e-5);
    let out = finsler(&["einstein-check", "--metric", "sphere2", "--with-oracle"], dir.path());
    assert!(json(&out)["summary"].get("oracle_scal").is_some());
}

#[test]
fn report_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(["einstein-check", "--metric", "sphere2", "--samples", "2", "--format", "csv"])
        .env("FINSLER_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("finsler-report.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.json",
        r#"{"metric": {"kind": "randers", "params": {"b": [0.3, -0.2]}}, "checks": ["properties", "einstein"],
            "samples": {"count": 16, "seed": 42}}"#,
    );
    // Byte comparison, minus the one timing line.
    let strip = |out: Output| {
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timing_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = strip(finsler(&["scan", &cfg], dir.path()));
    let b = strip(finsler(&["scan", &cfg], dir.path()));
    assert_eq!(a, b);
}
