//! Lossless pendulum with a Lur'e observer and three constant gains
//! switched by the dwell-time supervisor.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::kl::{GainFn, KLExp};
use crate::bounds::lyapunov::{lure_siios_estimate, solve_lyapunov_small, spectral_abscissa};
use crate::error::{Error, Result};
use crate::sim::{simulate, IntegratorConfig, Switching, Trajectory};
use crate::supervisor::SupervisorKind;
use crate::system::config::{DwellTime, SupervisorConfig};
use crate::system::family::ModeFamily;
use crate::system::norm::Sinusoids;
use crate::system::partition::Partition;
use crate::system::switchlog::SwitchLog;

pub const SLOW: usize = 0;
pub const MEDIAN: usize = 1;
pub const FAST: usize = 2;
pub const MODE_NAMES: [&str; 3] = ["slow", "median", "fast"];

/// Gain placing both error eigenvalues: `k1 = l1 + l2`, `k2 = l1·l2`.
pub fn gain_from_eigs(l1: f64, l2: f64) -> [f64; 2] {
    [l1 + l2, l1 * l2]
}

/// Observer error matrix `G = A − KC = [[−k1, 1], [−k2, 0]]`.
pub fn error_matrix(k: [f64; 2]) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[-k[0], 1.0, -k[1], 0.0])
}

/// Disturbance input of the error system.
pub fn input_matrix() -> DMatrix<f64> {
    DMatrix::from_column_slice(2, 1, &[0.0, 1.0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendulumObserverSetup {
    pub omega: f64,
    /// Gains indexed by mode: slow, median, fast.
    pub gains: [[f64; 2]; 3],
    pub partition: Partition,
    pub modes: Vec<usize>,
    pub chi: Vec<f64>,
    /// Constant dwell time, also `t_min`.
    pub dwell: f64,
    pub disturbance_amplitude: f64,
    pub disturbance_freq: f64,
    pub x0: [f64; 2],
    pub z0: [f64; 2],
    pub t_end: f64,
}

impl Default for PendulumObserverSetup {
    fn default() -> Self {
        PendulumObserverSetup {
            omega: 1.0,
            gains: [gain_from_eigs(1.0, 1.0), gain_from_eigs(3.0, 3.0), gain_from_eigs(5.0, 5.0)],
            partition: Partition::new(vec![0.0, 0.1, 2.0, 5.0]).expect("valid partition"),
            modes: vec![MEDIAN, FAST, MEDIAN, SLOW],
            chi: vec![0.05, 1.0, 3.0, 8.0],
            dwell: 0.01,
            disturbance_amplitude: 0.05,
            disturbance_freq: 0.3,
            x0: [0.1, 0.0],
            z0: [-4.0, 4.0],
            t_end: 20.0,
        }
    }
}

impl PendulumObserverSetup {
    pub fn check(&self) -> Result<()> {
        if self.gains.iter().flatten().any(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidConfig("observer gains must be positive".into()));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidConfig(format!("omega must be >= 0, got {}", self.omega)));
        }
        if !(self.dwell > 0.0) {
            return Err(Error::InvalidConfig(format!("dwell must be > 0, got {}", self.dwell)));
        }
        Ok(())
    }

    pub fn family(&self) -> PendulumObserver {
        PendulumObserver {
            omega: self.omega,
            gains: self.gains,
        }
    }

    pub fn supervisor_config(&self) -> Result<SupervisorConfig> {
        let n = self.partition.top() + 1;
        SupervisorConfig::new(
            self.partition.clone(),
            self.modes.clone(),
            self.chi.clone(),
            vec![DwellTime::Constant { value: self.dwell }; n],
        )
    }

    pub fn disturbance(&self) -> Sinusoids {
        Sinusoids::single(self.disturbance_amplitude, self.disturbance_freq)
    }

    pub fn initial_state(&self) -> Vec<f64> {
        vec![self.x0[0], self.x0[1], self.z0[0], self.z0[1]]
    }

    /// Per-mode estimates from the Lyapunov construction with decay
    /// `α_i = −max Re λ(G_i)`, and the largest gain over modes.
    pub fn lure_betas(&self) -> Result<(Vec<KLExp>, GainFn)> {
        let mut betas = Vec::with_capacity(3);
        let mut c: f64 = 0.0;
        for k in self.gains {
            let g = error_matrix(k);
            let alpha = -spectral_abscissa(&g);
            // stay strictly inside the spectral precondition
            let alpha = alpha * (1.0 - 1e-9);
            let p = solve_lyapunov_small(&g, alpha)?;
            let (beta, gamma) = lure_siios_estimate(&p, alpha, &input_matrix())?;
            betas.push(beta);
            c = c.max(gamma.c);
        }
        Ok((betas, GainFn::new(c)?))
    }

    /// Per-mode estimates read off the exact error flow: with decay
    /// `b_i = −max Re λ(G_i) / 8`, `a_i = sup_t ‖e^{G_i t}‖·e^{b_i t}`,
    /// and gain `c = max_i sup_t ∫₀ᵗ ‖e^{G_i s} B‖ ds`.
    pub fn measured_betas(&self) -> Result<(Vec<KLExp>, GainFn)> {
        let mut betas = Vec::with_capacity(3);
        let mut c: f64 = 0.0;
        for k in self.gains {
            let g = error_matrix(k);
            let rate = -spectral_abscissa(&g);
            if !(rate > 0.0) {
                return Err(Error::Infeasible("observer error matrix is not Hurwitz".into()));
            }
            let b = 0.125 * rate;
            let horizon = 40.0 / rate;
            let n = 8_000;
            let dt = horizon / n as f64;
            let mut a: f64 = 1.0;
            let mut l1 = 0.0;
            let mut prev = input_matrix().norm();
            for j in 1..=n {
                let t = j as f64 * dt;
                let phi = (&g * t).exp();
                a = a.max(phi.norm_spectral() * (b * t).exp());
                let cur = (&phi * input_matrix()).norm();
                l1 += 0.5 * dt * (prev + cur);
                prev = cur;
            }
            betas.push(KLExp::new(a, b)?);
            c = c.max(l1);
        }
        Ok((betas, GainFn::new(c)?))
    }
}

trait SpectralNorm {
    fn norm_spectral(&self) -> f64;
}

impl SpectralNorm for DMatrix<f64> {
    fn norm_spectral(&self) -> f64 {
        self.singular_values().max()
    }
}

/// Plant `(x1, x2)` and observer `(z1, z2)`; mode selects the gain.
#[derive(Clone, Debug, PartialEq)]
pub struct PendulumObserver {
    pub omega: f64,
    pub gains: [[f64; 2]; 3],
}

/// `ẋ1 = x2`, `ẋ2 = −ω² sin x1 + d`, `ż1 = z2 + k1 e1`,
/// `ż2 = −ω² sin x1 + k2 e1`, with `e1 = x1 − z1`.
pub fn pendulum_coupled_rhs(k: [f64; 2], omega: f64, s: &[f64], d: f64, out: &mut [f64]) {
    let (x1, x2, z1, z2) = (s[0], s[1], s[2], s[3]);
    let e1 = x1 - z1;
    let nl = -omega * omega * x1.sin();
    out[0] = x2;
    out[1] = nl + d;
    out[2] = z2 + k[0] * e1;
    out[3] = nl + k[1] * e1;
}

impl ModeFamily for PendulumObserver {
    fn state_dim(&self) -> usize {
        4
    }

    fn disturbance_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        2
    }

    fn mode_count(&self) -> usize {
        3
    }

    fn vector_field(&self, mode: usize, x: &[f64], d: &[f64], dx: &mut [f64]) {
        pendulum_coupled_rhs(self.gains[mode], self.omega, x, d[0], dx);
    }

    fn output(&self, x: &[f64], y: &mut [f64]) {
        y[0] = x[0] - x[2];
        y[1] = x[1] - x[3];
    }

    fn state_names(&self) -> Vec<String> {
        ["x1", "x2", "z1", "z2"].map(String::from).to_vec()
    }

    fn output_names(&self) -> Vec<String> {
        ["e1", "e2"].map(String::from).to_vec()
    }

    fn mode_name(&self, mode: usize) -> String {
        MODE_NAMES[mode].to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverChoice {
    Slow,
    Median,
    Fast,
    Hybrid,
}

impl ObserverChoice {
    pub const ALL: [ObserverChoice; 4] = [Self::Slow, Self::Median, Self::Fast, Self::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Self::Slow => "slow",
            Self::Median => "median",
            Self::Fast => "fast",
            Self::Hybrid => "hybrid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObserverMetrics {
    pub peak_e2: f64,
    /// First time with `|e| <= 0.1`, if reached.
    pub time_to_level: Option<f64>,
    pub switches: usize,
}

pub const CONVERGENCE_LEVEL: f64 = 0.1;

pub struct PendulumRun {
    pub choice: ObserverChoice,
    pub trajectory: Trajectory,
    pub log: SwitchLog,
    pub metrics: ObserverMetrics,
}

pub fn run_pendulum(setup: &PendulumObserverSetup, choice: ObserverChoice, cfg: &IntegratorConfig) -> Result<PendulumRun> {
    setup.check()?;
    let family = setup.family();
    let config = setup.supervisor_config()?;
    let switching = match choice {
        ObserverChoice::Slow => Switching::Fixed(SLOW),
        ObserverChoice::Median => Switching::Fixed(MEDIAN),
        ObserverChoice::Fast => Switching::Fixed(FAST),
        ObserverChoice::Hybrid => Switching::Supervised {
            kind: SupervisorKind::Dwell,
            config: &config,
        },
    };
    let d = setup.disturbance();
    let (trajectory, log) = simulate(&family, switching, &setup.initial_state(), &d, cfg)?;
    let metrics = ObserverMetrics {
        peak_e2: trajectory.peak_output_component(1),
        time_to_level: trajectory.first_time_below(CONVERGENCE_LEVEL),
        switches: log.len(),
    };
    Ok(PendulumRun {
        choice,
        trajectory,
        log,
        metrics,
    })
}
