//! Convergence-time estimates for the supervised loop and the
//! switching-threshold optimizer for two-mode designs.

use serde::{Deserialize, Serialize};

use crate::bounds::kl::{time_to_level, KLExp};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::system::config::SupervisorConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceVariant {
    /// Dwell-time supervisor: `Σ_{k=0..r} T_k(Δ_{k+1})`.
    Corollary1,
    /// Hysteresis supervisor: the dwell sum plus `T_r(Δ_{r+1}) + T_{r+1}(Δ_{r+1})`.
    Corollary3,
}

/// Upper estimate of the time needed to reach the base interval when
/// starting in interval `r` with no disturbance.
pub fn convergence_time_bound(config: &SupervisorConfig, r: usize, variant: ConvergenceVariant) -> Result<f64> {
    let top = config.top();
    if r > top {
        return Err(Error::Domain(format!("interval {r} exceeds top interval {top}")));
    }
    let chain: f64 = (0..=r).map(|k| config.dwell_at_upper(k)).sum();
    Ok(match variant {
        ConvergenceVariant::Corollary1 => chain,
        ConvergenceVariant::Corollary3 => {
            let edge = config.partition.upper(r);
            let next = (r + 1).min(top);
            chain + config.dwell_at_upper(r) + config.dwell_at(next, edge)
        }
    })
}

/// Total time `𝒯_1(s, Δ) + 𝒯_0(Δ, eps)` to bring the output from `s` to
/// `eps` when mode 1 runs down to `Δ` and mode 0 takes over.
pub fn two_stage_time(beta1: &KLExp, beta0: &KLExp, s: f64, delta: f64, eps: f64) -> Result<f64> {
    Ok(time_to_level(beta1, s, delta)? + time_to_level(beta0, delta, eps)?)
}

/// `(Δ, total time)` over the grid `Δ_j = eps + j·grid ∈ (eps, s]`.
pub fn threshold_sweep(
    beta1: &KLExp,
    beta0: &KLExp,
    s: f64,
    eps: f64,
    grid: f64,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    if !(eps > 0.0 && eps < s && s.is_finite()) {
        return Err(Error::Infeasible(format!("need 0 < eps < s (eps = {eps}, s = {s})")));
    }
    if !(grid > 0.0) {
        return Err(Error::InvalidConfig(format!("grid must be positive, got {grid}")));
    }
    let count = ((s - eps) / grid * (1.0 + 1e-12)).floor() as usize;
    if count == 0 {
        return Err(Error::Infeasible("no grid point inside (eps, s]".into()));
    }
    let points: Vec<f64> = (1..=count).map(|j| (eps + j as f64 * grid).min(s)).collect();
    par::map(&points, exec, |&delta| {
        two_stage_time(beta1, beta0, s, delta, eps).map(|total| (delta, total))
    })
    .into_iter()
    .collect()
}

/// Grid minimizer of the two-stage time; ties go to the smaller threshold.
pub fn optimal_threshold(beta1: &KLExp, beta0: &KLExp, s: f64, eps: f64, grid: f64) -> Result<(f64, f64)> {
    let sweep = threshold_sweep(beta1, beta0, s, eps, grid, Execution::default())?;
    Ok(argmin_row(&sweep))
}

/// Row with the smallest total; a later row wins only when it is better by
/// more than a relative 1e-9.
pub fn argmin_row(rows: &[(f64, f64)]) -> (f64, f64) {
    let mut best = rows[0];
    for &row in &rows[1..] {
        if row.1 < best.1 - 1e-9 * best.1.abs().max(1.0) {
            best = row;
        }
    }
    best
}
