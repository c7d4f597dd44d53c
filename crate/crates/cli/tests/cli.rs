use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geopoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn csv_lines(args: &[&str]) -> Vec<String> {
    let mut full = args.to_vec();
    full.extend(["--format", "csv"]);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect()
}

#[test]
fn gen_first_six() {
    let v = json(&["gen", "--n", "6"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6]["coeffs"], serde_json::json!(["1", "62", "540", "1560", "1800", "720"]));
    assert_eq!(rows[0]["coeffs"], serde_json::json!(["1"]));
}

#[test]
fn gen_zero_and_factorial() {
    assert_eq!(csv_lines(&["gen", "--n", "0"]), vec!["n,coeffs", "0,1"]);
    let v = json(&["gen", "--n", "21"]);
    let last = v[21]["coeffs"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last, "51090942171709440000");
}

#[test]
fn zeros_table() {
    let v = json(&["zeros", "--n", "7"]);
    assert_eq!(v["n"], 7);
    let zs = v["zeros"].as_array().unwrap();
    assert_eq!(zs.len(), 7);
    assert!(zs.iter().any(|z| z["exact"] == "0"));
    assert!(!zs.iter().any(|z| z["exact"] == "-1/2"));
    let v = json(&["zeros", "--n", "6"]);
    assert!(v["zeros"].as_array().unwrap().iter().any(|z| z["exact"] == "-1/2"));
}

#[test]
fn exterior_anchor() {
    let lines = csv_lines(&["asympt", "exterior", "--z", "1", "--n", "5"]);
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    let computed: f64 = fields[4].parse().unwrap();
    assert!((computed - 0.5).abs() < 1e-3);
    assert!(computed < 0.5);
}

#[test]
fn exterior_ladder_passes() {
    let out = run(&["asympt", "exterior", "--z", "1,2,-3,1+i", "--n", "20,60"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn non_decreasing_error_is_a_violation() {
    // just outside -1 the error oscillates at small n
    let out = run(&["asympt", "exterior", "--z", "-1.01", "--n", "3,4,5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not decrease"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn kolmogorov_ladder() {
    let v = json(&["dist", "--n", "25,50", "--check", "kolmogorov"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows[1]["kolmogorov"].as_f64().unwrap() < rows[0]["kolmogorov"].as_f64().unwrap());
}

#[test]
fn domain_violation_exits_2() {
    let out = run(&["asympt", "exterior", "--z", "-0.5", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn fubini_and_interior() {
    let v = json(&["asympt", "fubini", "--n", "5,10,20"]);
    assert_eq!(v["statement"], "fubini_limit");
    let v = json(&["asympt", "interior", "--n", "10,20", "--x", "-1/3,-7/10"]);
    assert_eq!(v["samples"].as_array().unwrap().len(), 4);
}

#[test]
fn stieltjes_row() {
    let lines = csv_lines(&["dist", "--n", "100", "--check", "stieltjes", "--z", "1"]);
    assert_eq!(lines.len(), 2);
    let err: f64 = lines[1].split(',').last().unwrap().parse().unwrap();
    assert!(err < 1e-8);
}

#[test]
fn cdf_plot_csv() {
    let lines = csv_lines(&["dist", "--n", "20", "--check", "cdf", "--points", "9"]);
    assert_eq!(lines[0], "x,rho,cdf,F_n");
    assert_eq!(lines.len(), 10);
    assert!(lines[5].starts_with("-0.5,"));
}

#[test]
fn ortho_nine_rows() {
    let lines = csv_lines(&["ortho", "--n-max", "10"]);
    assert_eq!(lines.len(), 10);
    assert!(lines[1..].iter().all(|l| l.ends_with(",0 (exact)")));
    let v = json(&["ortho", "--n-max", "10", "--parity"]);
    assert_eq!(v["parity"].as_array().unwrap().len(), 125);
}

#[test]
fn weights_report() {
    let v = json(&["weights", "--n", "12", "--interval", "-0.75,-0.25"]);
    assert_eq!(v["weights"].as_array().unwrap().len(), 11);
    let sum: f64 = v["sum"].as_str().unwrap().parse().unwrap();
    assert!((sum - 1.0).abs() < 1e-15);
    assert_eq!(v["interval"]["n"], 12);
}

#[test]
fn wide_enclosures_rejected_for_weights() {
    let out = run(&["weights", "--n", "5", "--width", "2^-20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("geopoly-cli-{}.csv", std::process::id()));
    let out = run(&["gen", "--n", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text, "n,coeffs\n0,1\n1,1\n2,1 2\n3,1 6 6\n");
}

#[test]
fn bad_arguments_are_rejected() {
    assert_eq!(run(&["gen", "--n", "3", "--precision", "20"]).status.code(), Some(2));
    assert_eq!(run(&["zeros", "--n", "3", "--width", "0"]).status.code(), Some(2));
    assert_eq!(run(&["asympt", "exterior", "--z", "1+2k", "--n", "3"]).status.code(), Some(2));
}
