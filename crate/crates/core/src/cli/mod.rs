//! Command-line front end.

pub mod experiment;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::convergence::{argmin_row, threshold_sweep};
use crate::bounds::kl::KLExp;
use crate::bounds::monitor::{theorem1_monitor, theorem2_monitor};
use crate::cases::lorenz::{run_lorenz_cell, CellMetrics, ControlChoice, InitialCondition, LorenzSetup};
use crate::cases::pendulum::{run_pendulum, ObserverChoice, PendulumObserverSetup};
use crate::error::{Error, Result};
use crate::experiments::{adjacency_batch, dwell_gap_batch};
use crate::par::{self, Execution};
use crate::sim::{simulate, IntegratorConfig, Switching, DEFAULT_EVENT_TOLERANCE, DEFAULT_STEP};
use crate::supervisor::SupervisorKind;
use crate::system::norm::GeneralizedNormParams;
use experiment::ExperimentConfig;
use output::{ensure_dir, write_json, write_monitor, write_records, write_table, write_trajectory};

pub const OUT_ENV: &str = "SWITCHKIT_OUT";

#[derive(Debug, Parser)]
#[command(name = "switchkit", version, about = "Supervisory switched-system simulations")]
pub struct Cli {
    /// Worker threads for independent runs (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory; the SWITCHKIT_OUT environment variable takes precedence.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Slow, median, fast and hybrid pendulum observers.
    Pendulum(PendulumArgs),
    /// Lorenz synchronization table: four controls by two initial conditions.
    LorenzTable(LorenzArgs),
    /// Two-mode switching-threshold sweep.
    SweepThreshold(SweepArgs),
    /// Run an experiment described by a JSON file.
    Simulate(SimulateArgs),
    /// Randomized dwell-gap and adjacency checks.
    Invariants(InvariantArgs),
}

#[derive(Debug, Args)]
pub struct PendulumArgs {
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tend: f64,
    /// Constant dwell time of the hybrid observer.
    #[arg(long, default_value_t = 0.01)]
    pub dwell: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Keep every n-th trajectory sample in the CSV files.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct LorenzArgs {
    #[arg(long, value_enum, default_value = "off")]
    pub disturbed: OnOff,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Horizon T of the performance functionals.
    #[arg(long, default_value_t = 30.0)]
    pub tend: f64,
    #[arg(long, default_value_t = crate::system::config::DEFAULT_CHI_FACTOR)]
    pub chi_factor: f64,
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts[..] else {
        return Err(format!("expected two comma-separated numbers, got {s:?}"));
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([num(a)?, num(b)?])
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Starting output norm.
    #[arg(long)]
    pub s: f64,
    /// Target level.
    #[arg(long)]
    pub eps: f64,
    /// Decay rates `b1,b0` of the first and second stage.
    #[arg(long, value_parser = parse_pair)]
    pub rates: [f64; 2],
    /// Overshoot coefficients `a1,a0`.
    #[arg(long, value_parser = parse_pair, default_value = "1,1")]
    pub overshoot: [f64; 2],
    /// Grid spacing; defaults to (s − eps)/1000.
    #[arg(long)]
    pub grid: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub tend: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct InvariantArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value >= limit,
        }
    }
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!(
            "{} {}: {} (limit {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.limit
        );
    }
}

/// Parse `args`, run the command and return the process exit code:
/// 0 on success, 1 on failure or failed checks, 2 on usage errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn output_dir(flag: Option<&Path>, fallback: Option<&Path>) -> PathBuf {
    std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| flag.map(Path::to_path_buf))
        .or_else(|| fallback.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Run a parsed command; `Ok(false)` means it ran but a check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    par::with_jobs(cli.jobs, || match &cli.command {
        Command::Pendulum(a) => cmd_pendulum(a, &output_dir(cli.out.as_deref(), None)),
        Command::LorenzTable(a) => cmd_lorenz_table(a, &output_dir(cli.out.as_deref(), None)),
        Command::SweepThreshold(a) => cmd_sweep_threshold(a, &output_dir(cli.out.as_deref(), None)),
        Command::Simulate(a) => cmd_simulate(a, cli.out.as_deref()),
        Command::Invariants(a) => cmd_invariants(a, &output_dir(cli.out.as_deref(), None)),
    })
}

fn integrator(step: f64, t_end: f64) -> Result<IntegratorConfig> {
    IntegratorConfig::new(step, DEFAULT_EVENT_TOLERANCE.min(0.5 * step), t_end)
}

pub fn cmd_pendulum(a: &PendulumArgs, out: &Path) -> Result<bool> {
    let setup = PendulumObserverSetup {
        omega: a.omega,
        dwell: a.dwell,
        t_end: a.tend,
        ..PendulumObserverSetup::default()
    };
    setup.check()?;
    let cfg = integrator(a.step, a.tend)?;
    ensure_dir(out)?;
    let runs = par::map(&ObserverChoice::ALL, Execution::default(), |&c| run_pendulum(&setup, c, &cfg));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let family = setup.family();
    for r in &runs {
        write_trajectory(&out.join(format!("pendulum_{}.csv", r.choice.name())), &family, &r.trajectory, a.stride)?;
    }
    let get = |c: ObserverChoice| runs.iter().find(|r| r.choice == c).expect("all observers ran");
    let (slow, fast, hybrid) = (get(ObserverChoice::Slow), get(ObserverChoice::Fast), get(ObserverChoice::Hybrid));

    let (betas, gamma) = setup.measured_betas()?;
    let config = setup.supervisor_config()?;
    let d = setup.disturbance();
    let monitor = theorem1_monitor(&hybrid.trajectory, &d, &betas, &gamma, &config, &GeneralizedNormParams::default())?;
    write_monitor(&out.join("pendulum_hybrid_monitor.csv"), &monitor)?;

    let level = |r: &crate::cases::pendulum::PendulumRun| r.metrics.time_to_level.unwrap_or(f64::INFINITY);
    let checks = vec![
        Check::at_most("hybrid peak |e2| / fast peak |e2|", hybrid.metrics.peak_e2 / fast.metrics.peak_e2, 0.7),
        Check::at_most("hybrid time to |e|<=0.1 / slow time", level(hybrid) / level(slow), 0.7),
        Check::at_least("hybrid switch count", hybrid.metrics.switches as f64, 1.0),
        Check::at_least("hybrid output bound worst margin", monitor.worst_margin, 0.0),
    ];
    let summary = json!({
        "metadata": {
            "step": cfg.step_size,
            "event_tolerance": cfg.event_tolerance,
            "t_end": cfg.t_end,
            "setup": setup,
            "betas": betas,
            "gamma": gamma,
        },
        "runs": runs.iter().map(|r| (r.choice.name(), r.metrics)).collect::<std::collections::BTreeMap<_, _>>(),
        "checks": checks,
    });
    write_json(&out.join("pendulum_summary.json"), &summary)?;
    for r in &runs {
        println!(
            "{:>7}: peak |e2| = {:.4}, time to |e| <= 0.1 = {}, switches = {}",
            r.choice.name(),
            r.metrics.peak_e2,
            r.metrics
                .time_to_level
                .map_or("not reached".to_string(), |t| format!("{t:.3}")),
            r.metrics.switches
        );
    }
    print_checks(&checks);
    Ok(checks.iter().all(|c| c.pass))
}

fn cell(cells: &[CellMetrics], c: ControlChoice, ic: InitialCondition) -> &CellMetrics {
    cells
        .iter()
        .find(|m| m.control == c && m.ic == ic)
        .expect("every table cell is computed")
}

/// Pass/fail checks for one table against the expected orderings.
pub fn lorenz_checks(cells: &[CellMetrics], disturbed: bool) -> Vec<Check> {
    use ControlChoice as C;
    use InitialCondition as I;
    let far = |c| cell(cells, c, I::Far).performance;
    let mut checks = Vec::new();
    if !disturbed {
        for ic in I::ALL {
            checks.push(Check::at_most(
                &format!("none J_u ({})", ic.name()),
                cell(cells, C::None, ic).performance.j_u,
                0.0,
            ));
            for c in [C::Cancel, C::Linear] {
                checks.push(Check::at_most(
                    &format!("{} J_a ({})", c.name(), ic.name()),
                    cell(cells, c, ic).performance.j_a,
                    1e-6,
                ));
            }
        }
        checks.push(Check::at_most(
            "supervisor J_u / cancel J_u (far)",
            far(C::Supervisor).j_u / far(C::Cancel).j_u,
            0.05,
        ));
    } else {
        let best = far(C::Cancel).j_u.min(far(C::Linear).j_u);
        checks.push(Check::at_most(
            "supervisor J_u / min(cancel, linear) J_u (far)",
            far(C::Supervisor).j_u / best,
            0.25,
        ));
        for ic in I::ALL {
            let sup = cell(cells, C::Supervisor, ic).performance.j_a;
            let lin = cell(cells, C::Linear, ic).performance.j_a;
            let ratio = (sup / lin).max(lin / sup);
            checks.push(Check::at_most(&format!("supervisor vs linear J_a factor ({})", ic.name()), ratio, 3.0));
        }
    }
    for ic in I::ALL {
        checks.push(Check::at_least(
            &format!("none J_e ({})", ic.name()),
            cell(cells, C::None, ic).performance.j_e,
            100.0,
        ));
    }
    checks
}

pub fn cmd_lorenz_table(a: &LorenzArgs, out: &Path) -> Result<bool> {
    let disturbed = a.disturbed == OnOff::On;
    let tag = if disturbed { "on" } else { "off" };
    let setup = LorenzSetup {
        chi_factor: a.chi_factor,
        horizon: a.tend,
        ..LorenzSetup::default()
    };
    setup.check()?;
    let sup_cfg = setup.supervisor_config()?;
    let cfg = integrator(a.step, a.tend)?;
    ensure_dir(out)?;
    let family = setup.family();
    let cells: Vec<(ControlChoice, InitialCondition)> = ControlChoice::ALL
        .iter()
        .flat_map(|&c| InitialCondition::ALL.iter().map(move |&ic| (c, ic)))
        .collect();
    let started = Instant::now();
    let results = par::map(&cells, Execution::default(), |&(c, ic)| -> Result<CellMetrics> {
        let run = run_lorenz_cell(&setup, c, ic, disturbed, &cfg)?;
        let path = out.join(format!("lorenz_{tag}_{}_{}.csv", c.name(), ic.name()));
        write_trajectory(&path, &family, &run.trajectory, a.stride)?;
        Ok(run.metrics)
    });
    let metrics = results.into_iter().collect::<Result<Vec<_>>>()?;
    let elapsed = started.elapsed().as_secs_f64();

    let headers = [
        "control", "J_e near", "J_e far", "J_a near", "J_a far", "J_u near", "J_u far", "switches near",
        "switches far",
    ];
    let rows: Vec<Vec<String>> = ControlChoice::ALL
        .iter()
        .map(|&c| {
            let (n, f) = (cell(&metrics, c, InitialCondition::Near), cell(&metrics, c, InitialCondition::Far));
            vec![
                c.name().to_string(),
                n.performance.j_e.to_string(),
                f.performance.j_e.to_string(),
                n.performance.j_a.to_string(),
                f.performance.j_a.to_string(),
                n.performance.j_u.to_string(),
                f.performance.j_u.to_string(),
                n.switches.to_string(),
                f.switches.to_string(),
            ]
        })
        .collect();
    write_records(&out.join(format!("lorenz_table_{tag}.csv")), &headers, &rows)?;

    let checks = lorenz_checks(&metrics, disturbed);
    let report = json!({
        "metadata": {
            "disturbed": disturbed,
            "step": cfg.step_size,
            "event_tolerance": cfg.event_tolerance,
            "chi_factor": setup.chi_factor,
            "chi": sup_cfg.chi,
            "setup": setup,
            "elapsed_seconds": elapsed,
        },
        "cells": metrics,
        "checks": checks,
    });
    write_json(&out.join(format!("lorenz_table_{tag}.json")), &report)?;

    println!("{:<11}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}", "control", "J_e near", "J_e far", "J_a near", "J_a far", "J_u near", "J_u far");
    for row in &rows {
        let num = |s: &str| s.parse::<f64>().unwrap_or(f64::NAN);
        println!(
            "{:<11}{:>12.4}{:>12.4}{:>12.4}{:>12.4}{:>12.4}{:>12.4}",
            row[0],
            num(&row[1]),
            num(&row[2]),
            num(&row[3]),
            num(&row[4]),
            num(&row[5]),
            num(&row[6])
        );
    }
    print_checks(&checks);
    Ok(checks.iter().all(|c| c.pass))
}

pub fn cmd_sweep_threshold(a: &SweepArgs, out: &Path) -> Result<bool> {
    let beta1 = KLExp::new(a.overshoot[0], a.rates[0])?;
    let beta0 = KLExp::new(a.overshoot[1], a.rates[1])?;
    let grid = a.grid.unwrap_or((a.s - a.eps) / 1000.0);
    let rows = threshold_sweep(&beta1, &beta0, a.s, a.eps, grid, Execution::default())?;
    let best = argmin_row(&rows);
    ensure_dir(out)?;
    let headers: Vec<String> = vec!["delta".into(), "total_time".into()];
    let table: Vec<Vec<Option<f64>>> = rows.iter().map(|&(d, t)| vec![Some(d), Some(t)]).collect();
    write_table(&out.join("sweep_threshold.csv"), &headers, &table)?;
    write_json(
        &out.join("sweep_threshold.json"),
        &json!({
            "s": a.s, "eps": a.eps, "grid": grid,
            "beta1": beta1, "beta0": beta0,
            "argmin": {"delta": best.0, "total_time": best.1},
        }),
    )?;
    println!("argmin delta = {}, total time = {}", best.0, best.1);
    Ok(true)
}

pub fn cmd_simulate(a: &SimulateArgs, out_flag: Option<&Path>) -> Result<bool> {
    let text = std::fs::read_to_string(&a.config)?;
    let exp = ExperimentConfig::from_json(&text)?;
    let mut r = exp.resolve()?;
    if let Some(step) = a.step {
        r.integrator.step_size = step;
        r.integrator.event_tolerance = r.integrator.event_tolerance.min(0.5 * step);
    }
    if let Some(t) = a.tend {
        r.integrator.t_end = t;
    }
    r.integrator.validate()?;
    let violations = r.violations();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Err(Error::InvalidConfig(format!("{} configuration violation(s)", violations.len())));
    }
    let out = output_dir(out_flag, exp.output_dir.as_deref());
    ensure_dir(&out)?;
    let sw = Switching::Supervised {
        kind: r.kind,
        config: &r.config,
    };
    let (traj, log) = simulate(r.family.as_ref(), sw, &r.x0, r.disturbance.as_ref(), &r.integrator)?;
    write_trajectory(&out.join("trajectory.csv"), r.family.as_ref(), &traj, exp.stride.unwrap_or(a.stride))?;
    let switch_rows: Vec<Vec<Option<f64>>> = log
        .events
        .iter()
        .map(|e| vec![Some(e.t), Some(e.from as f64), Some(e.to as f64)])
        .collect();
    write_table(&out.join("switches.csv"), &["t".into(), "from".into(), "to".into()], &switch_rows)?;

    let mut checks = Vec::new();
    if let (Some(betas), Some(gamma)) = (&r.betas, &r.gamma) {
        let params = GeneralizedNormParams::default();
        let report = match r.kind {
            SupervisorKind::Dwell => theorem1_monitor(&traj, r.disturbance.as_ref(), betas, gamma, &r.config, &params)?,
            SupervisorKind::Hysteresis => {
                theorem2_monitor(&traj, r.disturbance.as_ref(), betas, gamma, &r.config, &params)?
            }
        };
        write_monitor(&out.join("monitor.csv"), &report)?;
        checks.push(Check::at_least("output bound worst margin", report.worst_margin, 0.0));
    }
    write_json(
        &out.join("summary.json"),
        &json!({
            "metadata": {
                "scenario": exp.scenario,
                "supervisor": r.kind,
                "integrator": r.integrator,
                "config": r.config,
                "x0": r.x0,
            },
            "samples": traj.len(),
            "switches": log.len(),
            "final_output_norm": traj.output_norms.last(),
            "checks": checks,
        }),
    )?;
    println!("{} samples, {} switches, |y(T)| = {}", traj.len(), log.len(), traj.output_norms.last().unwrap_or(&0.0));
    print_checks(&checks);
    Ok(checks.iter().all(|c| c.pass))
}

pub fn cmd_invariants(a: &InvariantArgs, out: &Path) -> Result<bool> {
    let tol = DEFAULT_EVENT_TOLERANCE.min(0.5 * a.step);
    let dwell = dwell_gap_batch(a.seed, a.runs, a.step, tol, Execution::default())?;
    let adjacency = adjacency_batch(a.seed, a.runs, a.step, tol, Execution::default())?;
    ensure_dir(out)?;
    write_json(
        &out.join("invariants.json"),
        &json!({"seed": a.seed, "step": a.step, "event_tolerance": tol, "dwell_gap": dwell, "adjacency": adjacency}),
    )?;
    let checks = vec![
        Check::at_most("dwell gap violations", dwell.violations as f64, 0.0),
        Check::at_most("hysteresis adjacency violations", adjacency.violations as f64, 0.0),
    ];
    println!(
        "dwell: {} runs, {} switches; hysteresis: {} runs, {} switches",
        dwell.runs, dwell.switches, adjacency.runs, adjacency.switches
    );
    print_checks(&checks);
    Ok(checks.iter().all(|c| c.pass))
}
