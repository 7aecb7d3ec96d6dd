use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use switchkit::cli::output::read_table;
use tempfile::TempDir;

fn switchkit(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchkit"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SWITCHKIT_OUT")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pendulum_level(dir: &Path, name: &str) -> f64 {
    json(&dir.join("pendulum_summary.json"))["runs"][name]["time_to_level"]
        .as_f64()
        .unwrap_or(f64::INFINITY)
}

#[test]
fn pendulum_defaults_write_every_artifact() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["pendulum", "--stride", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["slow", "median", "fast", "hybrid"] {
        let table = read_table(&dir.path().join(format!("pendulum_{name}.csv"))).unwrap();
        assert!(table.rows.len() > 100);
        assert_eq!(table.headers[0], "t");
    }
    let summary = json(&dir.path().join("pendulum_summary.json"));
    assert!(summary["runs"]["hybrid"]["switches"].as_u64().unwrap() >= 1);
    assert!(summary["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(dir.path().join("pendulum_hybrid_monitor.csv").exists());
}

#[test]
fn longer_dwell_slows_the_hybrid_observer() {
    let base = TempDir::new().unwrap();
    let slow = TempDir::new().unwrap();
    switchkit(base.path(), &["pendulum", "--stride", "50"]);
    // the ratio checks may fail for this setting; only the artifacts matter here
    let out = switchkit(slow.path(), &["pendulum", "--stride", "50", "--dwell", "0.5"]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    assert!(pendulum_level(slow.path(), "hybrid") > pendulum_level(base.path(), "hybrid"));
}

#[test]
fn undisturbed_pendulum_completes() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["pendulum", "--omega", "0", "--stride", "50"]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let summary = json(&dir.path().join("pendulum_summary.json"));
    assert_eq!(summary["metadata"]["setup"]["omega"], 0.0);
    assert!(pendulum_level(dir.path(), "hybrid").is_finite());
}

fn lorenz_cell<'a>(report: &'a Value, control: &str, ic: &str) -> &'a Value {
    report["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["control"] == control && c["ic"] == ic)
        .unwrap()
}

#[test]
fn lorenz_table_without_disturbance() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["lorenz-table", "--disturbed", "off", "--stride", "100"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report = json(&dir.path().join("lorenz_table_off.json"));
    assert_eq!(report["cells"].as_array().unwrap().len(), 8);
    for ic in ["near", "far"] {
        assert_eq!(lorenz_cell(&report, "none", ic)["j_u"], 0.0);
    }
    let table = read_table(&dir.path().join("lorenz_table_off.csv"));
    // first column holds control names, which the numeric reader rejects
    assert!(table.is_err());
    let text = std::fs::read_to_string(dir.path().join("lorenz_table_off.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    let trajectories = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("lorenz_off_"))
        .count();
    assert_eq!(trajectories, 8);
}

#[test]
fn lorenz_table_with_disturbance() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["lorenz-table", "--disturbed", "on", "--stride", "100"]);
    assert!(out.status.success());
    let report = json(&dir.path().join("lorenz_table_on.json"));
    let ju = |c| lorenz_cell(&report, c, "far")["j_u"].as_f64().unwrap();
    assert!(ju("supervisor") < ju("linear"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["pendulum", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = switchkit(dir.path(), &["lorenz-table", "--disturbed", "sometimes"]);
    assert_eq!(out.status.code(), Some(2));
}

fn sweep(dir: &Path, rates: &str) -> (Vec<(f64, f64)>, f64) {
    let out = switchkit(dir, &["sweep-threshold", "--s", "10", "--eps", "0.01", "--rates", rates]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_table(&dir.join("sweep_threshold.csv")).unwrap();
    let rows = table.rows.iter().map(|r| (r[0].unwrap(), r[1].unwrap())).collect();
    let best = json(&dir.join("sweep_threshold.json"))["argmin"]["delta"].as_f64().unwrap();
    (rows, best)
}

#[test]
fn sweep_equal_rates_is_flat() {
    let dir = TempDir::new().unwrap();
    let (rows, best) = sweep(dir.path(), "1,1");
    // total time ln(Δ/eps)/b + ln(s/Δ)/b = ln(s/eps)/b for unit overshoot
    let flat = (10.0f64 / 0.01).ln();
    assert!(rows.iter().all(|&(_, t)| (t - flat).abs() < 1e-9));
    assert_eq!(best, rows[0].0);
}

#[test]
fn sweep_argmin_follows_the_faster_mode() {
    let dir = TempDir::new().unwrap();
    let (rows, best) = sweep(dir.path(), "5,1");
    assert!(best < rows[rows.len() / 10].0);
    let (rows, best) = sweep(dir.path(), "1,5");
    assert!(best > rows[rows.len() * 9 / 10].0);
}

#[test]
fn sweep_rejects_an_empty_range() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["sweep-threshold", "--s", "0.01", "--eps", "1", "--rates", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn environment_overrides_output_dir() {
    let flag = TempDir::new().unwrap();
    let env = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_switchkit"))
        .args(["--out", flag.path().to_str().unwrap(), "sweep-threshold", "--s", "2", "--eps", "0.1"])
        .args(["--rates", "1,2"])
        .env("SWITCHKIT_OUT", env.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env.path().join("sweep_threshold.csv").exists());
    assert!(!flag.path().join("sweep_threshold.csv").exists());
}

#[test]
fn simulate_custom_linear_config() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("experiment.json");
    let experiment = serde_json::json!({
        "scenario": "custom",
        "supervisor": "dwell",
        "integrator": {"step_size": 0.001, "t_end": 6.0},
        "family": {"a": [[[0.5]], [[-2.0]]], "b": [[1.0]], "c": [[1.0]]},
        "partition": [0.0, 1.0],
        "modes": [1, 1],
        "chi": [0.5, 2.0],
        "dwell": [{"kind": "constant", "value": 0.1}, {"kind": "constant", "value": 0.1}],
        "x0": [3.0],
        "betas": [{"a": 1.0, "b": 2.0}, {"a": 1.0, "b": 2.0}],
        "gamma": {"c": 0.5},
        "disturbance": {"kind": "sinusoids", "terms": [{"amplitude": 0.1, "freq": 2.0}]},
    });
    std::fs::write(&config, experiment.to_string()).unwrap();
    let out = switchkit(&dir.path().join("run"), &["simulate", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    let traj = read_table(&run.join("trajectory.csv")).unwrap();
    assert!(traj.rows.len() >= 6001);
    assert_eq!(traj.rows.last().unwrap()[0], Some(6.0));
    let switches = read_table(&run.join("switches.csv")).unwrap();
    assert_eq!(switches.rows.len(), 1);
    assert_eq!(switches.rows[0][1..], [Some(1.0), Some(0.0)]);
    let summary = json(&run.join("summary.json"));
    assert!(summary["final_output_norm"].as_f64().unwrap() < 0.1);
    assert!(run.join("monitor.csv").exists());
}

#[test]
fn simulate_rejects_a_broken_config() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"scenario": "custom", "bogus": 1}"#).unwrap();
    let out = switchkit(dir.path(), &["simulate", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invariants_subcommand_reports_clean_batches() {
    let dir = TempDir::new().unwrap();
    let out = switchkit(dir.path(), &["invariants", "--seed", "7", "--runs", "5"]);
    assert!(out.status.success());
    let report = json(&dir.path().join("invariants.json"));
    assert_eq!(report["dwell_gap"]["violations"], 0);
    assert_eq!(report["adjacency"]["violations"], 0);
}
