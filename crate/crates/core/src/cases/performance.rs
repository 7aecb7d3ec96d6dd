//! Time-averaged synchronization and control-effort functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Performance {
    /// `T⁻¹ ∫₀ᵀ |e|² dt`
    pub j_e: f64,
    /// `10·T⁻¹ ∫_{0.9T}^{T} |e|² dt`
    pub j_a: f64,
    /// `T⁻¹ ∫₀ᵀ |u|² dt`
    pub j_u: f64,
}

/// Trapezoid integral of sampled `f` over `[a, b]`, with linear
/// interpolation of `f` at window ends that fall between samples.
fn window_integral(times: &[f64], f: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo {
            continue;
        }
        let span = t1 - t0;
        let at = |s: f64| f[k - 1] + (f[k] - f[k - 1]) * (s - t0) / span;
        total += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    total
}

fn squared_norms(v: &[Vec<f64>]) -> Vec<f64> {
    v.iter().map(|c| c.iter().map(|x| x * x).sum()).collect()
}

/// Functionals of a run whose outputs are the synchronization error `e`
/// and whose controls are `u`, over the horizon `[0, horizon]`.
pub fn performance(traj: &Trajectory, horizon: f64) -> Result<Performance> {
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    if traj.len() < 2 || traj.t_end() < horizon * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "trajectory ends at {} before the horizon {horizon}",
            traj.t_end()
        )));
    }
    let e2 = squared_norms(&traj.outputs);
    let u2 = squared_norms(&traj.controls);
    Ok(Performance {
        j_e: window_integral(&traj.times, &e2, 0.0, horizon) / horizon,
        j_a: 10.0 * window_integral(&traj.times, &e2, 0.9 * horizon, horizon) / horizon,
        j_u: window_integral(&traj.times, &u2, 0.0, horizon) / horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(e: f64, u: f64, horizon: f64, n: usize) -> Trajectory {
        let times: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
        let len = times.len();
        Trajectory {
            times,
            states: vec![vec![0.0]; len],
            outputs: vec![vec![e, 0.0, 0.0]; len],
            controls: vec![vec![0.0, u]; len],
            output_norms: vec![e; len],
            modes: vec![0; len],
            intervals: vec![None; len],
        }
    }

    #[test]
    fn unit_error() {
        let p = performance(&constant(1.0, 0.0, 30.0, 777), 30.0).unwrap();
        assert!((p.j_e - 1.0).abs() < 1e-12);
        assert!((p.j_a - 1.0).abs() < 1e-12);
        assert_eq!(p.j_u, 0.0);
    }

    #[test]
    fn constant_control() {
        let p = performance(&constant(0.0, 2.0, 30.0, 300), 30.0).unwrap();
        assert_eq!((p.j_e, p.j_a), (0.0, 0.0));
        assert!((p.j_u - 4.0).abs() < 1e-12);
    }

    #[test]
    fn short_trajectory() {
        assert!(performance(&constant(1.0, 0.0, 10.0, 10), 30.0).is_err());
    }

    #[test]
    fn linear_ramp_window() {
        // f(t) = t on [0, 10]: ∫_{9}^{10} t dt = 9.5 with any grid
        let times: Vec<f64> = (0..=7).map(|k| k as f64 * 10.0 / 7.0).collect();
        assert!((window_integral(&times, &times, 9.0, 10.0) - 9.5).abs() < 1e-12);
    }
}
