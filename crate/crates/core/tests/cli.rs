use std::path::Path;
use std::process::{Command, Output};

use rpdcov::harness::{generate_example, ExampleId, ExampleSpec};
use rpdcov::io::write_csv;
use rpdcov::{DataMatrix, RngSeed};

fn rpdcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpdcov")).args(args).env("RPDCOV_THREADS", "1").output().unwrap()
}

fn write_pair(dir: &Path, id: ExampleId, n: usize, p: usize, q: usize) -> (String, String) {
    let data = generate_example(&ExampleSpec::new(id, n).dims(p, q).seed(RngSeed::new(1))).unwrap();
    let (x, y) = (dir.join("x.csv"), dir.join("y.csv"));
    write_csv(&data.x, &x).unwrap();
    write_csv(&data.y, &y).unwrap();
    (x.to_str().unwrap().to_owned(), y.to_str().unwrap().to_owned())
}

#[test]
fn test_subcommand_prints_json_result() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = write_pair(dir.path(), ExampleId::Ex2, 120, 3, 3);
    let out = rpdcov(&["test", "--x", &x, "--y", &y, "--method", "rpdc-gamma", "--k", "50", "--alpha", "0.05", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["method"], "rpdc_gamma");
    assert_eq!(v["config"]["seed"], 7);
    assert!(v["statistic"].as_f64().unwrap().is_finite());
    assert_eq!(v["reject"], true);
}

#[test]
fn every_test_method_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = write_pair(dir.path(), ExampleId::Ex1, 60, 2, 2);
    for m in ["rpdc-gamma", "rpdc-perm", "ddc", "wilks", "puri-sen"] {
        let out = rpdcov(&["test", "--x", &x, "--y", &y, "--method", m, "--k", "5", "--perms", "19", "--format", "csv"]);
        assert_eq!(out.status.code(), Some(0), "{m}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("method,statistic"), "{text}");
    }
}

#[test]
fn fast_estimate_on_multivariate_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = write_pair(dir.path(), ExampleId::Ex1, 30, 3, 1);
    let out = rpdcov(&["dcov", "--x", &x, "--y", &y, "--method", "fast"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn dcov_methods_agree_on_univariate_input() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = write_pair(dir.path(), ExampleId::Ex6, 80, 1, 1);
    let value = |m: &str| {
        let out = rpdcov(&["dcov", "--x", &x, "--y", &y, "--method", m, "--k", "3"]);
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()["value"].as_f64().unwrap()
    };
    let (fast, brute, proj) = (value("fast"), value("brute"), value("rpdc"));
    assert!((fast - brute).abs() <= 1e-12 * brute.abs().max(1.0));
    assert!((fast - proj).abs() <= 1e-12 * brute.abs().max(1.0));
}

#[test]
fn degenerate_data_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    let y = dir.path().join("y.csv");
    write_csv(&DataMatrix::from_rows(&vec![vec![2.0, 3.0]; 20]).unwrap(), &x).unwrap();
    write_csv(&DataMatrix::from_column(&(0..20).map(f64::from).collect::<Vec<_>>()).unwrap(), &y).unwrap();
    let out = rpdcov(&["test", "--x", x.to_str().unwrap(), "--y", y.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degenerate"], true);
}

#[test]
fn io_and_usage_errors_exit_two() {
    assert_eq!(rpdcov(&["test", "--x", "/nonexistent/x.csv", "--y", "/nonexistent/y.csv"]).status.code(), Some(2));
    assert_eq!(rpdcov(&["simulate", "--example", "9"]).status.code(), Some(2));
    assert_eq!(rpdcov(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = write_pair(dir.path(), ExampleId::Ex1, 30, 2, 2);
    assert_eq!(rpdcov(&["test", "--x", &x, "--y", &y, "--method", "nope"]).status.code(), Some(2));
    assert_eq!(rpdcov(&["test", "--x", &x, "--y", &y, "--alpha", "1.5"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = rpdcov(&["simulate", "--example", "6", "--sigma", "1", "--n", "300", "--reps", "100", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["replicates"], 100);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 2);
    for c in cells {
        let rate = c["rejection_rate"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&rate));
        assert!(c["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    }
    // ddc power on this law at n = 300
    assert!(cells[1]["rejection_rate"].as_f64().unwrap() > 0.9);
}

#[test]
fn simulate_csv_and_bench() {
    let out = rpdcov(&["simulate", "--example", "5", "--rho", "0.5", "--n", "40,80", "--p", "2", "--q", "2", "--reps", "5", "--methods", "wilks", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);

    let out = rpdcov(&["bench", "--n-list", "64,128", "--dims", "4", "--repeats", "3", "--k", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);

    let out = rpdcov(&["bench", "--n-list", "64,128,256", "--dims", "4", "--repeats", "3", "--k", "5", "--break-even"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["dim_sum"], 4);

    assert_eq!(rpdcov(&["bench", "--repeats", "2", "--n-list", "64"]).status.code(), Some(2));
}
