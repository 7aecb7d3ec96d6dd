//! Runtime checks of the output bounds guaranteed by the two supervisors.

use serde::{Deserialize, Serialize};

use crate::bounds::kl::{GainFn, KLExp};
use crate::error::{Error, Result};
use crate::sim::Trajectory;
use crate::system::config::SupervisorConfig;
use crate::system::norm::{Disturbance, GeneralizedNormParams, SNormAccumulator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub t: f64,
    pub y_norm: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub rows: Vec<MonitorRow>,
    /// Minimum margin over all samples; non-negative when the bound held.
    pub worst_margin: f64,
}

impl MonitorReport {
    pub fn holds(&self) -> bool {
        self.worst_margin >= 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Flavor {
    Dwell,
    Hysteresis,
}

fn mode_beta(betas: &[KLExp], mode: usize) -> Result<KLExp> {
    betas
        .get(mode)
        .copied()
        .ok_or_else(|| Error::InvalidConfig(format!("no KL estimate for mode {mode}")))
}

fn run_monitor(
    flavor: Flavor,
    traj: &Trajectory,
    d: &dyn Disturbance,
    betas: &[KLExp],
    gamma: &GainFn,
    config: &SupervisorConfig,
    norm_params: &GeneralizedNormParams,
) -> Result<MonitorReport> {
    norm_params.validate()?;
    if traj.is_empty() {
        return Err(Error::Domain("empty trajectory".into()));
    }
    // β̄(s, 0) = max_i a_i·s over the modes the supervisor can select
    let mut a_bar: f64 = 1.0;
    for &m in &config.modes {
        a_bar = a_bar.max(mode_beta(betas, m)?.a);
    }
    let a_top = mode_beta(betas, config.modes[config.top()])?.a;
    let delta_m = config.partition.lower(config.top());
    let v0 = traj.output_norms[0];
    let transient = match flavor {
        Flavor::Dwell => a_bar * (2.0 * delta_m).max(v0),
        Flavor::Hysteresis => a_bar * delta_m.max(v0),
    };

    let mut acc = SNormAccumulator::new(*norm_params);
    let mut rows = Vec::with_capacity(traj.len());
    let mut worst = f64::INFINITY;
    for (&t, &y_norm) in traj.times.iter().zip(&traj.output_norms) {
        acc.push(t, d.norm_at(t));
        let g = gamma.eval(acc.value());
        let gain_term = match flavor {
            Flavor::Dwell => g + a_top * 2.0 * g,
            Flavor::Hysteresis => g,
        };
        let bound = transient + gain_term;
        let margin = bound - y_norm;
        worst = worst.min(margin);
        rows.push(MonitorRow {
            t,
            y_norm,
            bound,
            margin,
        });
    }
    Ok(MonitorReport {
        rows,
        worst_margin: worst,
    })
}

/// Dwell-time supervisor bound
/// `|y(t)| <= β̄(max{2Δ_M, |h(x0)|}, 0) + γ̄(S[d, 0, t])` with
/// `γ̄(s) = γ(s) + β_{θ_M}(2γ(s), 0)`.
pub fn theorem1_monitor(
    traj: &Trajectory,
    d: &dyn Disturbance,
    betas: &[KLExp],
    gamma: &GainFn,
    config: &SupervisorConfig,
    norm_params: &GeneralizedNormParams,
) -> Result<MonitorReport> {
    run_monitor(Flavor::Dwell, traj, d, betas, gamma, config, norm_params)
}

/// Hysteresis supervisor bound
/// `|y(t)| <= β̄(max{Δ_M, |h(x0)|}, 0) + γ(S[d, 0, t])`.
pub fn theorem2_monitor(
    traj: &Trajectory,
    d: &dyn Disturbance,
    betas: &[KLExp],
    gamma: &GainFn,
    config: &SupervisorConfig,
    norm_params: &GeneralizedNormParams,
) -> Result<MonitorReport> {
    run_monitor(Flavor::Hysteresis, traj, d, betas, gamma, config, norm_params)
}
