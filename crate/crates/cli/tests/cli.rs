use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn biortho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biortho")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn analyze_sphere() {
    let r = json(&biortho(&["analyze", "--zoo", "S4", "--points", "10"]));
    assert_eq!(r["points_analyzed"], 10);
    for k in ["k1", "k2", "k3"] {
        assert!((f(&r["biortho"][k]["min"]) - 1.0).abs() < 1e-12);
        assert!((f(&r["biortho"][k]["max"]) - 1.0).abs() < 1e-12);
    }
    assert_eq!(r["verdicts"]["thm1_2"]["status"], "pass");
    assert_eq!(r["verdicts"]["isotropic"]["label"], "positive");
    assert_eq!(r["verdicts"]["einstein"]["holds"], true);
    assert_eq!(r["verdicts"]["lcf"]["holds"], true);
    assert!(r["timings"].is_null());
}

#[test]
fn flipped_orientation_swaps_the_spectra() {
    let at = "0.7,1.1,2.0,3.0";
    let standard = json(&biortho(&["analyze", "--zoo", "CP2", "--at", at]));
    let flipped = json(&biortho(&["analyze", "--zoo", "CP2", "--at", at, "--flip-orientation"]));
    let spectra = |r: &Value, side: &str| -> Vec<f64> {
        r["points"][0]["spectra"][side].as_array().unwrap().iter().map(f).collect()
    };
    let want = [-2.0, -2.0, 4.0];
    for (got, w) in spectra(&flipped, "wminus").iter().zip(want) {
        assert!((got - w).abs() < 1e-12, "{got}");
    }
    assert!(spectra(&flipped, "wplus").iter().all(|v| v.abs() < 1e-12));
    assert_eq!(spectra(&standard, "wplus"), spectra(&flipped, "wminus"));
    assert_eq!(flipped["orientation"], "flipped");
}

#[test]
fn requested_check_without_lambda1_is_an_input_error() {
    let out = biortho(&["analyze", "--zoo", "T4", "--thm3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda1 required"));
}

#[test]
fn requested_check_with_a_violated_precondition_exits_2() {
    let out = biortho(&["analyze", "--zoo", "T4", "--thm3", "--lambda1", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive scalar curvature"));
    let out = biortho(&["analyze", "--zoo", "S1xS3", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["precondition_violations"][0]["check"], "cor1_9");
}

#[test]
fn input_errors_exit_1() {
    for args in [
        &["analyze", "--zoo", "K3"][..],
        &["analyze", "--zoo", "S4", "--param", "r=-1"],
        &["analyze", "--zoo", "S4", "--at", "1,2,3"],
        &["sweep", "--zoo", "S4", "--res", "2"],
        &["analyze", "--config", "/nonexistent/metric"],
        &["analyze", "--zoo", "S4", "--tol", "0"],
    ] {
        let out = biortho(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn sphere_product_sweep() {
    let r = json(&biortho(&["sweep", "--zoo", "S2xS2", "--res", "24", "--plane-samples", "0"]));
    let i = &r["verdicts"]["cor1_7"];
    assert!(f(&i["value"]).abs() <= 1e-3 * f(&i["total_abs_scalar"]));
    assert_eq!(r["verdicts"]["thm1_6"]["label"], "weak");
    assert_eq!(r["verdicts"]["thm1_2"]["status"], "fail");
    assert_eq!(r["grid"]["resolution"][0], 24);
}

#[test]
fn sphere_convergence_table() {
    let r = json(&biortho(&["sweep", "--zoo", "S4", "--res", "12,24,48", "--plane-samples", "0"]));
    let c = &r["convergence"];
    let rows = c["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let reference = f(&c["reference"]);
    assert!((reference - 64.0 * std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-9);
    let errors: Vec<f64> = rows.iter().map(|row| f(&row["error"])).collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2]);
    assert!(errors[2] < 1e-3 * reference);
    assert_eq!(c["orders_vs_reference"].as_array().unwrap().len(), 2);
}

#[test]
fn flat_torus_sweep() {
    let r = json(&biortho(&["sweep", "--zoo", "T4", "--res", "8"]));
    assert_eq!(f(&r["integral"]), 0.0);
    assert_eq!(r["grid"]["collapsed_axes"], serde_json::json!([true, true, true, true]));
    let r = json(&biortho(&["classify", "--zoo", "T4pert", "--res", "8", "--plane-samples", "0"]));
    assert!(r["points"].is_null());
    assert!(r["verdicts"]["cor1_7"].is_object());
}

#[test]
fn reports_are_byte_identical() {
    let args = ["analyze", "--zoo", "CP2", "--points", "5", "--seed", "3"];
    let a = biortho(&args);
    let b = biortho(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = biortho(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.csv");
    json(&biortho(&["sweep", "--zoo", "S4", "--res", "4", "--csv", path.to_str().unwrap()]));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x0,x1,x2,x3,s,k1,k2,k3,w1p,w2p,w3p,w1m,w2m,w3m,weight"));
    assert_eq!(lines.count(), 4 * 4 * 4);
}

#[test]
fn list_zoo() {
    let r = json(&biortho(&["list-zoo"]));
    let names: Vec<&str> = r.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["T4", "S4", "CP2", "S1xS3", "S2xS2", "T4pert"]);
    assert_eq!(r[2]["ground_truth"]["k1_over_s"]["provenance"], "published");
    assert!(r[5]["ground_truth"].is_null());
}

#[test]
fn thread_count_does_not_change_the_report() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_biortho"))
            .args(["sweep", "--zoo", "CP2", "--res", "6"])
            .env("BIORTHO_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn config_files() {
    let r = json(&biortho(&["analyze", "--config", &config("s4.metric"), "--points", "5"]));
    assert!((f(&r["biortho"]["s"]["min"]) - 3.0).abs() < 1e-12);
    assert_eq!(r["metric"]["source"], "config");
    let r = json(&biortho(&["analyze", "--config", &config("conformal_torus.metric"), "--points", "5"]));
    assert_eq!(r["verdicts"]["lcf"]["holds"], true);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.metric");
    std::fs::write(&bad, "[metric]\ng00 = \"1\"\n").unwrap();
    let out = biortho(&["analyze", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_agrees_with_closed_form() {
    let r = json(&biortho(&["oracle", "--zoo", "CP2", "--points", "2", "--random", "5"]));
    assert_eq!(r["cases"].as_array().unwrap().len(), 7);
    assert!(f(&r["max_error"]) < 1e-6);
    let first = &r["cases"][0];
    assert!((f(&first["closed_k1"]) - f(&first["s"]) / 24.0).abs() < 1e-12);
    let out = biortho(&["oracle", "--oracle-res", "4"]);
    assert_eq!(out.status.code(), Some(1));
}
