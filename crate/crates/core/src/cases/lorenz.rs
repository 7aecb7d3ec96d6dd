//! Master–slave Lorenz synchronization with cancellation, linear and
//! no-control laws, switched by the hysteresis supervisor.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cases::performance::{performance, Performance};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::sim::{simulate, IntegratorConfig, Rk4, Switching, Trajectory};
use crate::supervisor::SupervisorKind;
use crate::system::config::{default_chi, DwellTime, SupervisorConfig, DEFAULT_CHI_FACTOR};
use crate::system::family::ModeFamily;
use crate::system::norm::{Disturbance, NoDisturbance, SineTerm, Sinusoids};
use crate::system::partition::Partition;
use crate::system::switchlog::SwitchLog;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LorenzControl {
    Cancel = 0,
    Linear = 1,
    None = 2,
}

impl LorenzControl {
    pub const ALL: [LorenzControl; 3] = [Self::Cancel, Self::Linear, Self::None];

    pub fn mode(self) -> usize {
        self as usize
    }

    pub fn from_mode(mode: usize) -> Option<Self> {
        Self::ALL.get(mode).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Cancel => "cancel",
            Self::Linear => "linear",
            Self::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorenzSetup {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    /// Cancellation parameter in `(0, 1)`.
    pub lambda: f64,
    /// Linear gain; the local error matrix is Hurwitz for `α > 27`.
    pub alpha: f64,
    pub partition: Partition,
    /// Family mode per interval, see [`LorenzControl`].
    pub modes: Vec<usize>,
    pub chi_factor: f64,
    pub horizon: f64,
}

impl Default for LorenzSetup {
    fn default() -> Self {
        LorenzSetup {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            lambda: 0.1,
            alpha: 28.0,
            partition: Partition::new(vec![0.0, 0.1, 1.0, 5.0]).expect("valid partition"),
            modes: vec![
                LorenzControl::None.mode(),
                LorenzControl::Linear.mode(),
                LorenzControl::Cancel.mode(),
                LorenzControl::None.mode(),
            ],
            chi_factor: DEFAULT_CHI_FACTOR,
            horizon: 30.0,
        }
    }
}

impl LorenzSetup {
    pub fn check(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.rho > 0.0 && self.beta > 0.0) {
            return Err(Error::InvalidConfig("sigma, rho and beta must be positive".into()));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidConfig(format!("lambda must lie in (0, 1), got {}", self.lambda)));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        Ok(())
    }

    pub fn family(&self) -> LorenzPair {
        LorenzPair { setup: self.clone() }
    }

    pub fn supervisor_config(&self) -> Result<SupervisorConfig> {
        let chi = default_chi(&self.partition, self.chi_factor)?;
        let n = self.partition.top() + 1;
        SupervisorConfig::new(
            self.partition.clone(),
            self.modes.clone(),
            chi,
            vec![DwellTime::Constant { value: 0.0 }; n],
        )
    }
}

/// Master disturbance `(5 sin 0.5t, −5 cos 0.1t, 2.5 sin t)`.
pub fn lorenz_disturbance() -> Sinusoids {
    let term = |amplitude, freq, phase| SineTerm {
        amplitude,
        freq,
        phase,
    };
    Sinusoids {
        terms: vec![term(5.0, 0.5, 0.0), term(5.0, 0.1, -FRAC_PI_2), term(2.5, 1.0, 0.0)],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Master `(0.1, 0, 0)`, slave `(−1, 1, −1)`.
    Near,
    /// Master `(0.1, 0, 0)`, slave `(−10, 10, −10)`.
    Far,
}

impl InitialCondition {
    pub const ALL: [InitialCondition; 2] = [Self::Near, Self::Far];

    pub fn state(self) -> [f64; 6] {
        match self {
            Self::Near => [0.1, 0.0, 0.0, -1.0, 1.0, -1.0],
            Self::Far => [0.1, 0.0, 0.0, -10.0, 10.0, -10.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Near => "near",
            Self::Far => "far",
        }
    }
}

/// Master `(x1, y1, z1)` and slave `(x2, y2, z2)`; mode selects the control.
#[derive(Clone, Debug, PartialEq)]
pub struct LorenzPair {
    pub setup: LorenzSetup,
}

/// Slave control `(u1, u2)` for the given law.
pub fn lorenz_control(p: &LorenzSetup, c: LorenzControl, s: &[f64], u: &mut [f64]) {
    let e1 = s[0] - s[3];
    match c {
        LorenzControl::Cancel => {
            let k = p.rho + p.sigma - 2.0 * ((1.0 - p.lambda) * p.sigma).sqrt();
            u[0] = (k - s[5]) * e1;
            u[1] = s[4] * e1;
        }
        LorenzControl::Linear => {
            u[0] = p.alpha * e1;
            u[1] = 0.0;
        }
        LorenzControl::None => {
            u[0] = 0.0;
            u[1] = 0.0;
        }
    }
}

pub fn lorenz_coupled_rhs(p: &LorenzSetup, c: LorenzControl, s: &[f64], d: &[f64], out: &mut [f64]) {
    let (x1, y1, z1, x2, y2, z2) = (s[0], s[1], s[2], s[3], s[4], s[5]);
    let mut u = [0.0; 2];
    lorenz_control(p, c, s, &mut u);
    out[0] = p.sigma * (y1 - x1) + d[0];
    out[1] = x1 * (p.rho - z1) - y1 + d[1];
    out[2] = x1 * y1 - p.beta * z1 + d[2];
    out[3] = p.sigma * (y2 - x2);
    out[4] = x2 * (p.rho - z2) - y2 + u[0];
    out[5] = x2 * y2 - p.beta * z2 + u[1];
}

impl ModeFamily for LorenzPair {
    fn state_dim(&self) -> usize {
        6
    }

    fn disturbance_dim(&self) -> usize {
        3
    }

    fn output_dim(&self) -> usize {
        3
    }

    fn mode_count(&self) -> usize {
        3
    }

    fn vector_field(&self, mode: usize, x: &[f64], d: &[f64], dx: &mut [f64]) {
        lorenz_coupled_rhs(&self.setup, LorenzControl::ALL[mode], x, d, dx);
    }

    fn output(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..3 {
            y[i] = x[i] - x[i + 3];
        }
    }

    fn control_dim(&self) -> usize {
        2
    }

    fn control(&self, mode: usize, x: &[f64], u: &mut [f64]) {
        lorenz_control(&self.setup, LorenzControl::ALL[mode], x, u);
    }

    fn state_names(&self) -> Vec<String> {
        ["x1", "y1", "z1", "x2", "y2", "z2"].map(String::from).to_vec()
    }

    fn output_names(&self) -> Vec<String> {
        ["e1", "e2", "e3"].map(String::from).to_vec()
    }

    fn mode_name(&self, mode: usize) -> String {
        LorenzControl::ALL[mode].name().to_string()
    }
}

/// Error matrix of the linear law around the synchronized origin.
pub fn linear_error_matrix(p: &LorenzSetup, alpha: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[-p.sigma, p.sigma, 0.0, p.rho - alpha, -1.0, 0.0, 0.0, 0.0, -p.beta],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlChoice {
    Cancel,
    Linear,
    None,
    Supervisor,
}

impl ControlChoice {
    /// Table row order.
    pub const ALL: [ControlChoice; 4] = [Self::Cancel, Self::Linear, Self::None, Self::Supervisor];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cancel => "cancel",
            Self::Linear => "linear",
            Self::None => "none",
            Self::Supervisor => "supervisor",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub control: ControlChoice,
    pub ic: InitialCondition,
    pub disturbed: bool,
    #[serde(flatten)]
    pub performance: Performance,
    pub switches: usize,
    /// Largest master-state norm over the run.
    pub master_peak: f64,
}

pub struct LorenzRun {
    pub metrics: CellMetrics,
    pub trajectory: Trajectory,
    pub log: SwitchLog,
}

pub fn run_lorenz_cell(
    setup: &LorenzSetup,
    control: ControlChoice,
    ic: InitialCondition,
    disturbed: bool,
    cfg: &IntegratorConfig,
) -> Result<LorenzRun> {
    setup.check()?;
    let family = setup.family();
    let config = setup.supervisor_config()?;
    let switching = match control {
        ControlChoice::Cancel => Switching::Fixed(LorenzControl::Cancel.mode()),
        ControlChoice::Linear => Switching::Fixed(LorenzControl::Linear.mode()),
        ControlChoice::None => Switching::Fixed(LorenzControl::None.mode()),
        ControlChoice::Supervisor => Switching::Supervised {
            kind: SupervisorKind::Hysteresis,
            config: &config,
        },
    };
    let cfg = IntegratorConfig {
        t_end: setup.horizon,
        ..*cfg
    };
    let dist = lorenz_disturbance();
    let none = NoDisturbance { dim: 3 };
    let d: &dyn Disturbance = if disturbed { &dist } else { &none };
    let (trajectory, log) = simulate(&family, switching, &ic.state(), d, &cfg)?;
    let master_peak = trajectory
        .states
        .iter()
        .map(|s| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt())
        .fold(0.0, f64::max);
    let metrics = CellMetrics {
        control,
        ic,
        disturbed,
        performance: performance(&trajectory, setup.horizon)?,
        switches: log.len(),
        master_peak,
    };
    Ok(LorenzRun {
        metrics,
        trajectory,
        log,
    })
}

/// All `controls × initial conditions` cells in row-major table order.
pub fn run_lorenz_table(
    setup: &LorenzSetup,
    disturbed: bool,
    cfg: &IntegratorConfig,
    exec: Execution,
) -> Result<Vec<CellMetrics>> {
    let cells: Vec<(ControlChoice, InitialCondition)> = ControlChoice::ALL
        .iter()
        .flat_map(|&c| InitialCondition::ALL.iter().map(move |&ic| (c, ic)))
        .collect();
    par::map(&cells, exec, |&(c, ic)| {
        run_lorenz_cell(setup, c, ic, disturbed, cfg).map(|r| r.metrics)
    })
    .into_iter()
    .collect()
}

/// Decrease certificate for the cancellation law without disturbance:
/// `V̇ + λσe1² + (√((1−λ)σ)·e1 − e2)² + βe3²` at each sample, where `V̇`
/// is a central difference of `V = eᵀe/2` along the flow with step `delta`.
pub fn lyapunov_decrease_residuals(p: &LorenzSetup, traj: &Trajectory, delta: f64) -> Result<Vec<f64>> {
    let mut rk = Rk4::new(6);
    let zero = [0.0; 3];
    let mut f = |_t: f64, x: &[f64], dx: &mut [f64]| lorenz_coupled_rhs(p, LorenzControl::Cancel, x, &zero, dx);
    let v = |s: &[f64]| 0.5 * (0..3).map(|i| (s[i] - s[i + 3]).powi(2)).sum::<f64>();
    let k = ((1.0 - p.lambda) * p.sigma).sqrt();
    let (mut fwd, mut bwd) = ([0.0; 6], [0.0; 6]);
    let mut out = Vec::with_capacity(traj.len());
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        rk.step(&mut f, t, s, delta, &mut fwd)?;
        rk.step(&mut f, t, s, -delta, &mut bwd)?;
        let v_dot = (v(&fwd) - v(&bwd)) / (2.0 * delta);
        let (e1, e2, e3) = (s[0] - s[3], s[1] - s[4], s[2] - s[5]);
        out.push(v_dot + p.lambda * p.sigma * e1 * e1 + (k * e1 - e2).powi(2) + p.beta * e3 * e3);
    }
    Ok(out)
}
