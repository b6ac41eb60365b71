//! Exit-code contract of the `hjlab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hjlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hjlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    let out = dir.join(format!("{name}.out"));
    fs::write(&path, format!("out_dir = {:?}\n{body}", out.to_str().unwrap())).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "pass.toml", "command = \"certify-barrier\"\nemit_svg = true\n");
    let out = hjlab(&["certify-barrier", "--config", &cfg, "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("pass.toml.out/report.csv")).unwrap();
    assert!(report.starts_with("case_id,command,n,p,q,B,R,extra,bound,observed,min_margin,pass\n"));
    assert!(report.trim_end().ends_with(",true"));
    for name in ["ledger.csv", "field_0.csv", "plot_0.svg"] {
        assert!(dir.path().join("pass.toml.out").join(name).exists(), "{name}");
    }
}

#[test]
fn failing_and_inconclusive_runs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fail.toml", "command = \"solve-pharmonic\"\ngrid_points = 16\n[grid]\np = [4.0]\n");
    assert_eq!(hjlab(&["solve-pharmonic", "--config", &cfg]).status.code(), Some(1));
    let cfg =
        write_config(dir.path(), "short.toml", "command = \"liouville\"\nr_max = 0.01\n[grid]\ns0 = [0.1]\n");
    let out = hjlab(&["liouville", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("short.toml.out/report.csv")).unwrap();
    assert!(report.trim_end().ends_with(",inconclusive"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ok.toml", "command = \"ledger\"\n");
    assert_eq!(hjlab(&["no-such-command", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(hjlab(&["ledger"]).status.code(), Some(2));
    assert_eq!(hjlab(&["ledger", "--config", &cfg, "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(hjlab(&["harnack", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(hjlab(&["ledger", "--config", "/nonexistent/cfg.toml"]).status.code(), Some(2));

    let bad = write_config(dir.path(), "bad.toml", "command = \"ledger\"\n[grid]\np = [2.0]\nq = [1.0]\n");
    let out = hjlab(&["ledger", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q > p-1"));
    let malformed = write_config(dir.path(), "malformed.toml", "command = \n");
    assert_eq!(hjlab(&["ledger", "--config", &malformed]).status.code(), Some(2));
}

#[test]
fn ledger_run_writes_constants_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ledger.toml", "command = \"ledger\"\n[grid]\nn = [2, 3]\n");
    assert_eq!(hjlab(&["ledger", "--config", &cfg]).status.code(), Some(0));
    let out = dir.path().join("ledger.toml.out");
    assert_eq!(fs::read_to_string(out.join("ledger.csv")).unwrap().lines().count(), 3);
    assert!(!out.join("report.csv").exists());
}
