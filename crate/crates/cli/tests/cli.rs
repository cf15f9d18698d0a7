use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vqa-noise"))
}

fn run(sub: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = out.join("config.json");
    fs::create_dir_all(out).unwrap();
    fs::write(&cfg, config).unwrap();
    let output = bin().arg(sub).arg("--config").arg(&cfg).arg("--out").arg(out).args(extra).output().unwrap();
    output
}

fn ok(sub: &str, config: &str, out: &Path, extra: &[&str]) {
    let o = run(sub, config, out, extra);
    assert!(o.status.success(), "{sub} failed: {}", String::from_utf8_lossy(&o.stderr));
}

fn csv(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const SEARCH: &str = r#"{"schema": 1, "problem": "search", "n": 4, "depth": 4, "seed": 3, "restarts": 4}"#;

#[test]
fn optimize_search_is_accepted() {
    let dir = TempDir::new().unwrap();
    ok("optimize", SEARCH, dir.path(), &[]);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("optimize.json")).unwrap()).unwrap();
    let rec = &v[0];
    assert_eq!(rec["summary"]["bounds"]["accepted"], true);
    assert!(rec["summary"]["bounds"]["lower"].as_f64().unwrap() > 0.0);
    let overlap = rec["overlap"].as_f64().unwrap();
    assert!(overlap >= rec["summary"]["bounds"]["lower_clamped"].as_f64().unwrap() - 1e-9);
    assert_eq!(rec["result"]["params"].as_array().unwrap().len(), 8);
}

#[test]
fn malformed_config_fails() {
    let dir = TempDir::new().unwrap();
    let o = run("optimize", r#"{"schema": 1, "problem": "search", "n": 4,"#, dir.path(), &[]);
    assert!(!o.status.success());
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    let o = run("optimize", r#"{"schema": 2, "problem": "search", "n": 4, "depth": 1, "seed": 0}"#, dir.path(), &[]);
    assert!(!o.status.success());
    let o = run("optimize", r#"{"schema": 1, "problem": "search", "n": 4, "depth": 1, "seed": 0, "typo": 1}"#, dir.path(), &[]);
    assert!(!o.status.success());
    assert!(!dir.path().join("optimize.json").exists());
}

#[test]
fn fixed_seed_is_byte_identical_across_thread_counts() {
    let cfg = r#"{"schema": 1, "problem": "maxcut", "n": 4, "depth": 2, "seed": 11, "restarts": 3,
                  "sigma_grid": [0.02, 0.05], "n_samples": 100}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    ok("sigma-sweep", cfg, a.path(), &["--threads", "1"]);
    ok("sigma-sweep", cfg, b.path(), &["--threads", "3"]);
    for f in ["sigma_sweep.csv", "sigma_sweep_summary.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let c = TempDir::new().unwrap();
    ok("sigma-sweep", cfg, c.path(), &["--seed", "12"]);
    assert_ne!(fs::read(a.path().join("sigma_sweep.csv")).unwrap(), fs::read(c.path().join("sigma_sweep.csv")).unwrap());
}

#[test]
fn zero_spread_gives_zero_shift_and_reports_gate_count() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema": 1, "problem": "ising", "n": 4, "depth": 1, "seed": 5, "restarts": 2,
                  "instance_count": 2, "sigma_grid": [0.0], "n_samples": 10}"#;
    ok("sigma-sweep", cfg, dir.path(), &[]);
    let (header, rows) = csv(dir.path().join("sigma_sweep.csv"));
    assert_eq!(header, ["sigma", "mean_dE", "stderr", "exact_dE", "q", "n"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(num(&rows[0][1]), 0.0);
    assert_eq!(num(&rows[0][3]), 0.0);
    // Checkerboard: 5 gates per qubit per layer.
    assert_eq!(rows[0][4], "20");
    assert_eq!(rows[0][5], "4");
}

#[test]
fn small_sigma_sweep_is_quadratic() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema": 1, "problem": "ising", "n": 4, "depth": 2, "seed": 9, "restarts": 4,
                  "instance_count": 3, "sigma_grid": [0.01, 0.02, 0.03, 0.05, 0.07, 0.1], "n_samples": 1000}"#;
    ok("sigma-sweep", cfg, dir.path(), &["--gnuplot-script"]);
    assert!(dir.path().join("sigma_sweep.gp").exists());
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sigma_sweep_summary.json")).unwrap()).unwrap();
    let slope = v["ensemble_power_law"]["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    assert_eq!(v["instances"].as_array().unwrap().len(), 3);
}

#[test]
fn param_sweep_zero_shift_matches_optimum() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema": 1, "problem": "search", "n": 3, "depth": 2, "seed": 1, "restarts": 3,
                  "delta_grid": [-0.2, -0.1, 0.0, 0.1, 0.2]}"#;
    ok("param-sweep", cfg, dir.path(), &[]);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("param_ranking.json")).unwrap()).unwrap();
    let e_star = v[0]["e_star"].as_f64().unwrap();
    assert_eq!(v[0]["ranking"].as_array().unwrap().len(), 4);
    let (header, rows) = csv(dir.path().join("param_sweep_0.csv"));
    assert_eq!(header, ["param_label", "layer", "delta", "energy"]);
    assert_eq!(rows.len(), 4 * 5);
    for r in rows.iter().filter(|r| num(&r[2]) == 0.0) {
        assert!((num(&r[3]) - e_star).abs() < 1e-12);
    }
    // Near an optimum every shift costs energy.
    assert!(rows.iter().all(|r| num(&r[3]) >= e_star - 1e-9));
}

#[test]
fn time_scan_structure() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema": 1, "problem": "search", "n": 3, "depth": 1, "seed": 2, "restarts": 2,
                  "depths": [1, 2, 3], "budgets": [0.0, 0.5, 1.0, 1.5, 2.0, 3.0]}"#;
    ok("time-scan", cfg, dir.path(), &[]);
    let (header, rows) = csv(dir.path().join("time_scan.csv"));
    assert_eq!(header, ["p", "t_max", "E_star", "t_exec", "overlap", "converged"]);
    assert_eq!(rows.len(), 18);
    let zero: Vec<f64> = rows.iter().filter(|r| num(&r[1]) == 0.0).map(|r| num(&r[2])).collect();
    assert_eq!(zero.len(), 3);
    assert!(zero.iter().all(|e| (e - zero[0]).abs() < 1e-12));
    for w in rows.windows(2).filter(|w| w[0][0] == w[1][0]) {
        assert!(num(&w[1][2]) <= num(&w[0][2]) + 1e-9);
    }
    for r in &rows {
        assert!(num(&r[3]) <= num(&r[1]) + 1e-9);
    }
    assert!(dir.path().join("time_scan_plateaus.json").exists());
}

#[test]
fn time_scan_rejects_vqe_problem() {
    let dir = TempDir::new().unwrap();
    let o = run("time-scan", r#"{"schema": 1, "problem": "ising", "n": 4, "depth": 1, "seed": 0, "budgets": [1.0]}"#, dir.path(), &[]);
    assert!(!o.status.success());
}
