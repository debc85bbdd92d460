//! The `glduality` binary: exit codes, output files and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glduality"))
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml")
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = bin();
    c.args(args);
    match threads {
        Some(t) => c.env("GLDUALITY_THREADS", t),
        None => c.env_remove("GLDUALITY_THREADS"),
    };
    c.output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const TRIVIAL: &str = "[domain]\ndim = 1\nn = 8\n[model]\ngamma = 1.0\nalpha = 1.0\nbeta = 1.0\nf = \"const:0\"\n";

#[test]
fn solve_writes_field_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let out = dir.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("u0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 33);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("solve.json")).unwrap()).unwrap();
    assert_eq!(json["solve"]["converged"], true);
    assert_eq!(json["config_echo"]["domain"]["n"], 32);
}

#[test]
fn verify_outputs_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let mut reports = Vec::new();
    for (i, threads) in [Some("1"), Some("3"), None].into_iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let o = run(
            &["verify", "--config", cfg.to_str().unwrap(), "--suite", "thm1", "--out", out.to_str().unwrap()],
            threads,
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        reports.push(std::fs::read(out.join("thm1.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
    let v: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "duality_gap"));
    assert_eq!(v["config_echo"]["reg"]["K"], 100.0);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let o = run(
        &["verify", "--config", cfg.to_str().unwrap(), "--suite", "exact-dual", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn premise_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // one Newton step cannot reach this tolerance from zero
    let body = format!("{TRIVIAL}[solver]\nmax_iter = 1\ntol = 1e-300\n").replace("const:0", "const:40");
    let path = write_config(dir.path(), &body);
    let o = run(
        &["verify", "--config", path.to_str().unwrap(), "--suite", "thm1", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let c = cfg.to_str().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(run(&["verify", "--config", c, "--suite", "thm9", "--out", d], None).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--config", c, "--param", "K", "--out", d], None).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--config", c, "--param", "K", "--values", "", "--out", d], None).status.code(), Some(2));
    assert_eq!(run(&["explode", "--config", c], None).status.code(), Some(2));
    assert_eq!(run(&["solve", "--config", "/nonexistent.toml"], None).status.code(), Some(2));
    assert_eq!(run(&["solve", "--config", c, "--out", d], Some("0")).status.code(), Some(2));
    let bad = write_config(dir.path(), &TRIVIAL.replace("beta = 1.0", "beta = -1.0"));
    let o = run(&["solve", "--config", bad.to_str().unwrap(), "--out", d], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta must be > 0"));
    let missing = write_config(dir.path(), &TRIVIAL.replace("const:0", "file:nope.csv"));
    let o = run(&["solve", "--config", missing.to_str().unwrap(), "--out", d], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.csv"));
}

#[test]
fn source_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,u\n");
    for i in 1..=8 {
        csv += &format!("{},{}\n", i as f64 / 9.0, 0.5);
    }
    std::fs::write(dir.path().join("f.csv"), csv).unwrap();
    let cfg = write_config(dir.path(), &TRIVIAL.replace("const:0", "file:f.csv"));
    let out = dir.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn eps_sweep_reports_det_slope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let o = run(
        &[
            "sweep", "--config", cfg.to_str().unwrap(), "--suite", "toland", "--param", "eps", "--values",
            "1e-1,1e-2,1e-3", "--out", dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
    let slope: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("# slope det_coupling "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 2.0).abs() <= 0.2, "{slope}");
}

#[test]
fn single_value_sweep_matches_suite_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let (c, d) = (cfg.to_str().unwrap(), dir.path().to_str().unwrap());
    let o = run(&["sweep", "--config", c, "--suite", "thm1", "--param", "K", "--values", "100", "--out", d], None);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    run(&["verify", "--config", c, "--suite", "thm1", "--out", d], None);
    let rep: glduality::CheckReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("thm1.json")).unwrap()).unwrap();
    assert_eq!(row[1], "1.0");
    assert_eq!(row[3].parse::<f64>().unwrap(), rep.worst_ratio());
}

#[test]
fn biconj_writes_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{TRIVIAL}[checks]\nbiconj_points = 101\n").replace("gamma = 1.0", "gamma = 0.01"));
    let o = run(&["biconj", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("biconj.csv")).unwrap();
    assert_eq!(csv.lines().count(), 102);
    assert!(dir.path().join("biconj.json").exists());
}
