use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SINGLE: &str = r#"{"dim":2,"K":[[[0,0],[-1,0]],[[-1,0],[0,0]]],"h":[[[1,0],[0,0]],[[0,0],[-1,0]]],"beta":1.0,"f":[[1,0],[-1,0]]}"#;

fn araki(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_araki")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn single_mode_report_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "single.json", SINGLE);
    let out = araki(&["entropy", "single", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = &json(&out)["report"];
    let expect = (0.5f64).tanh();
    for key in ["araki_analytic", "araki_fd", "vn_direct", "vn_commutator"] {
        assert!((report[key].as_f64().unwrap() - expect).abs() < 1e-8, "{key}: {report}");
    }
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn impossible_tolerance_is_a_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "single.json", SINGLE);
    let out = araki(&["--tol", "1e-300", "entropy", "single", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["report"]["verdict"], "fail");
}

#[test]
fn echoed_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "single.json", SINGLE);
    let first = araki(&["entropy", "exp", "--config", cfg.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0));
    let echoed = serde_json::to_string(&json(&first)["config"]).unwrap();
    let cfg2 = write(dir.path(), "echoed.json", &echoed);
    let second = araki(&["entropy", "exp", "--config", cfg2.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let run = |threads: &str| araki(&["sweep", "--instances", "16", "--seed", "5", "--threads", threads]).stdout;
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("1"));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 17);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn empty_sweep_is_header_only() {
    let out = araki(&["sweep", "--instances", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), ["index,dim,beta,araki_analytic,araki_fd,vn_direct,vn_commutator,max_pairwise_discrepancy,verdict"]);
}

#[test]
fn sweep_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let out = araki(&["--format", "json", "--out", path.to_str().unwrap(), "sweep", "--instances", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(rows.to_string().matches("\"verdict\"").count(), 3);
}

#[test]
fn majorana_single_mode_total() {
    let out = araki(&["majorana", "--a", "3.141592653589793", "--m", "1", "--beta", "1", "--coeff", "1:1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let total = json(&out)["total"].as_f64().unwrap();
    let expect = 2f64.sqrt() * (2f64.sqrt() / 2.0).tanh();
    assert!((total - expect).abs() < 1e-8, "{total}");
}

#[test]
fn check_suites_pass() {
    let out = araki(&["check", "--suite", "all", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 5);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(araki(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(araki(&["entropy", "single", "--config", "/nonexistent/x.json"]).status.code(), Some(1));
    assert_eq!(araki(&["majorana", "--a", "-1", "--coeff", "1:1,0"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"dim":2,"K":[[[1,0],[0,0]],[[0,0],[1,0]]],"h":[[[1,0],[0,0]],[[0,0],[1,0]]],"beta":1.0,"f":[[1,0],[0,0]]}"#);
    let out = araki(&["entropy", "single", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
