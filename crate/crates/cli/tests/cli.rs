use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p1energy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

/// Data rows of a CSV output, without comments and header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn energy_values() {
    let real = json(&["energy"]);
    assert!((f(&real["rows"][0]["energy"]) - 0.426_278).abs() < 5e-7);
    assert_eq!(real["rows"][0]["exact"], "7*zeta(3)/(2*pi^2)");
    let two = json(&["energy", "--p", "2"]);
    assert!((f(&two["rows"][0]["energy"]) - 0.462_098).abs() < 5e-7);
    let three = json(&["energy", "--p", "3"]);
    assert!((f(&three["rows"][0]["energy"]) - 3.0 * 3f64.ln() / 8.0).abs() < 1e-15);
    assert_eq!(three["rows"][0]["exact"], "3*log(3)/8");
}

#[test]
fn csv_header_carries_schema_units_and_formula() {
    let text = stdout(&["energy"]);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].contains("schema=1") && lines[0].contains("units=nats"));
    assert!(lines[1].starts_with("# formula:"));
    assert_eq!(lines[2], "field,energy[nats],series[nats],exact");
}

#[test]
fn log_display_flags_convert_only_presentation() {
    let nats = f(&json(&["energy", "--p", "2"])["rows"][0]["energy"]);
    let bits = json(&["energy", "--p", "2", "--log2"]);
    assert_eq!(bits["units"], "bits");
    assert!((f(&bits["rows"][0]["energy"]) - nats / std::f64::consts::LN_2).abs() < 1e-15);
    let tens = f(&json(&["energy", "--p", "2", "--log10"])["rows"][0]["energy"]);
    assert!((tens - nats / std::f64::consts::LN_10).abs() < 1e-15);
    assert!(!run(&["energy", "--log2", "--log10"]).status.success());
}

#[test]
fn bound_table_and_comparisons() {
    let r = json(&["bound", "--primes", "2", "--arch"]);
    assert!((f(&r["meta"]["bound"]) - 0.444_188).abs() < 5e-7);
    assert!((f(&r["meta"]["schinzel"]) - 0.240_606).abs() < 5e-7);
    assert!((f(&r["meta"]["bombieri_zannier"]) - 0.115_525).abs() < 5e-7);
    assert_eq!(r["rows"][0]["exact"], "1/3*log(2)");
    assert_eq!(r["rows"][1]["exact"], "7/4*zeta(3)/pi^2");
    let g = json(&["bound", "--field-degrees", "2:1,2,1"]);
    assert!((f(&g["meta"]["bound"]) - 0.092_420).abs() < 5e-7);
    let bad = run(&["bound", "--field-degrees", "2:1,1,1,3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn golden_ratio_height_and_splitting() {
    let r = json(&["height", "--poly", "-1,-1,1"]);
    assert!((f(&r["rows"][0]["height"]) - 0.240_605_9).abs() < 1e-7);
    assert_eq!(r["rows"][0]["totally_real"], true);
    let s = json(&["split-check", "--poly", "-1,-1,1", "--places", "5,11,inf"]);
    let splits: Vec<bool> = s["rows"].as_array().unwrap().iter().map(|r| r["splits"].as_bool().unwrap()).collect();
    assert_eq!(splits, [false, true, true]);
}

#[test]
fn local_discrepancy_cross_checks() {
    let a = json(&["discrepancy-local", "--poly", "1,0,1", "--place", "inf"]);
    assert!((f(&a["rows"][0]["discrepancy"]) + 2f64.ln()).abs() < 1e-12);
    assert_eq!(a["rows"][0]["agree"], true);
    let p = json(&["discrepancy-local", "--poly", "-6,-5,1", "--place", "7"]);
    assert_eq!(p["rows"][0]["exact"], "1*log(7)");
    assert_eq!(p["rows"][0]["agree"], true);
}

#[test]
fn identical_seed_gives_identical_bytes() {
    for args in [
        ["sample", "--n", "2000", "--seed", "9"].as_slice(),
        ["sample", "--p", "3", "--n", "2000", "--seed", "9"].as_slice(),
        ["converge", "--p", "2", "--n-max", "3000", "--seed", "9"].as_slice(),
        ["equidist", "--p", "3", "--polys", "50", "--seed", "9"].as_slice(),
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
    assert_ne!(stdout(&["sample", "--n", "10", "--seed", "1"]), stdout(&["sample", "--n", "10", "--seed", "2"]));
}

#[test]
fn converge_ladder() {
    let rows = csv_rows(&stdout(&["converge", "--n-max", "20000", "--seed", "3"]));
    let ns: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns[0], 2);
    assert_eq!(*ns.last().unwrap(), 20_000);
    assert!(ns.windows(2).all(|w| w[0] < w[1]));
    assert!(rows[0][1].parse::<f64>().unwrap().is_finite());
    let last = rows.last().unwrap();
    assert!(last[3].parse::<f64>().unwrap().abs() < 0.01);
}

#[test]
fn equidistribution_table() {
    let r = json(&["equidist", "--p", "2", "--polys", "400"]);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let total: f64 = rows.iter().map(|r| f(&r["frequency"])).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| (f(&r["target"]) - 1.0 / 3.0).abs() < 1e-15));
    assert_eq!(r["meta"]["roots"], 800);
    assert!(f(&r["meta"]["chi2"]) >= 0.0);
}

#[test]
fn product_formula_on_corpus() {
    let r = json(&["verify-identity", "--corpus", "50", "--seed", "11"]);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r["pass"] == true));
    let one = json(&["verify-identity", "--poly", "-1,-1,1"]);
    assert!(f(&one["rows"][0]["residual"]).abs() < 1e-12);
}

#[test]
fn search_reports_minimum_and_no_violation() {
    let r = json(&["search", "--degree-max", "3", "--coeff-max", "4", "--nontrivial-only"]);
    assert_eq!(r["meta"]["violations"], 0);
    assert!(f(&r["meta"]["min_height"]) >= f(&r["meta"]["bound"]));
    assert!(r["rows"].as_array().unwrap().iter().all(|h| h["nontrivial"] == true));
}

#[test]
fn output_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let out = run(&["energy", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&["energy"]));
    assert_eq!(run(&["height", "--poly", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["energy", "--q", "6"]).status.code(), Some(2));
}

#[test]
fn quick_checks_pass() {
    let out = run(&["all-checks", "--quick", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["rows"].as_array().unwrap().len(), 11);
    assert_eq!(r["meta"]["failed"], 0);
}
