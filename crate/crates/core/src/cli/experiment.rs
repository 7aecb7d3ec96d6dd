//! JSON experiment files for the `simulate` subcommand.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bounds::kl::{GainFn, KLExp};
use crate::cases::lorenz::{lorenz_disturbance, InitialCondition, LorenzSetup};
use crate::cases::pendulum::PendulumObserverSetup;
use crate::error::{Error, Result};
use crate::sim::{IntegratorConfig, DEFAULT_EVENT_TOLERANCE, DEFAULT_STEP};
use crate::supervisor::SupervisorKind;
use crate::system::config::{validate_config, DwellTime, SupervisorConfig, Violation};
use crate::system::family::{LinearFamily, ModeFamily};
use crate::system::norm::{Disturbance, NoDisturbance, Sinusoids};
use crate::system::partition::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Pendulum,
    Lorenz,
    /// Linear modes given inline as `family`.
    Custom,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisturbanceSelector {
    /// The scenario's own disturbance (none for custom).
    #[default]
    Default,
    None,
    Sinusoids {
        terms: Vec<crate::system::norm::SineTerm>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub supervisor: Option<SupervisorKind>,
    #[serde(default)]
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub partition: Option<Partition>,
    #[serde(default)]
    pub modes: Option<Vec<usize>>,
    #[serde(default)]
    pub chi: Option<Vec<f64>>,
    #[serde(default)]
    pub dwell: Option<Vec<DwellTime>>,
    #[serde(default)]
    pub disturbance: DisturbanceSelector,
    /// Per-mode estimates used for validation and the bound monitor.
    #[serde(default)]
    pub betas: Option<Vec<KLExp>>,
    #[serde(default)]
    pub gamma: Option<GainFn>,
    #[serde(default)]
    pub family: Option<LinearFamily>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub initial_condition: Option<InitialCondition>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub stride: Option<usize>,
}

pub struct Resolved {
    pub family: Box<dyn ModeFamily>,
    pub config: SupervisorConfig,
    pub kind: SupervisorKind,
    pub x0: Vec<f64>,
    pub disturbance: Box<dyn Disturbance>,
    pub integrator: IntegratorConfig,
    pub betas: Option<Vec<KLExp>>,
    pub gamma: Option<GainFn>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fill every omitted field from the scenario defaults.
    pub fn resolve(&self) -> Result<Resolved> {
        let (family, base, kind, x0, default_d, betas, gamma, t_end): (
            Box<dyn ModeFamily>,
            SupervisorConfig,
            SupervisorKind,
            Vec<f64>,
            Box<dyn Disturbance>,
            Option<Vec<KLExp>>,
            Option<GainFn>,
            f64,
        ) = match self.scenario {
            Scenario::Pendulum => {
                let s = PendulumObserverSetup::default();
                let (b, g) = s.measured_betas()?;
                (
                    Box::new(s.family()),
                    s.supervisor_config()?,
                    SupervisorKind::Dwell,
                    s.initial_state(),
                    Box::new(s.disturbance()),
                    Some(b),
                    Some(g),
                    s.t_end,
                )
            }
            Scenario::Lorenz => {
                let s = LorenzSetup::default();
                let ic = self.initial_condition.unwrap_or(InitialCondition::Far);
                (
                    Box::new(s.family()),
                    s.supervisor_config()?,
                    SupervisorKind::Hysteresis,
                    ic.state().to_vec(),
                    Box::new(lorenz_disturbance()),
                    None,
                    None,
                    s.horizon,
                )
            }
            Scenario::Custom => {
                let fam = self
                    .family
                    .clone()
                    .ok_or_else(|| Error::InvalidConfig("custom scenario needs a `family`".into()))?;
                fam.check()?;
                let partition = self
                    .partition
                    .clone()
                    .ok_or_else(|| Error::InvalidConfig("custom scenario needs a `partition`".into()))?;
                let n = partition.top() + 1;
                let modes = self.modes.clone().unwrap_or_else(|| (0..n).map(|q| q.min(fam.mode_count() - 1)).collect());
                let chi = crate::system::config::default_chi(&partition, crate::system::config::DEFAULT_CHI_FACTOR)?;
                let base = SupervisorConfig::new(partition, modes, chi, vec![DwellTime::Constant { value: 0.1 }; n])?;
                let x0 = vec![0.0; fam.state_dim()];
                let d: Box<dyn Disturbance> = Box::new(NoDisturbance { dim: fam.disturbance_dim() });
                (Box::new(fam), base, SupervisorKind::Dwell, x0, d, None, None, 10.0)
            }
        };

        let mut config = base;
        if let Some(p) = &self.partition {
            config.partition = p.clone();
        }
        if let Some(m) = &self.modes {
            config.modes = m.clone();
        }
        if let Some(c) = &self.chi {
            config.chi = c.clone();
        }
        if let Some(d) = &self.dwell {
            config.dwell = d.clone();
        }
        let disturbance: Box<dyn Disturbance> = match &self.disturbance {
            DisturbanceSelector::Default => default_d,
            DisturbanceSelector::None => Box::new(NoDisturbance {
                dim: family.disturbance_dim(),
            }),
            DisturbanceSelector::Sinusoids { terms } => Box::new(Sinusoids { terms: terms.clone() }),
        };
        let integrator = self.integrator.unwrap_or(IntegratorConfig {
            step_size: DEFAULT_STEP,
            event_tolerance: DEFAULT_EVENT_TOLERANCE,
            t_end,
        });
        integrator.validate()?;
        Ok(Resolved {
            family,
            config,
            kind: self.supervisor.unwrap_or(kind),
            x0: self.x0.clone().unwrap_or(x0),
            disturbance,
            integrator,
            betas: self.betas.clone().or(betas),
            gamma: self.gamma.or(gamma),
        })
    }
}

impl Resolved {
    /// Admissibility of the supervisor configuration. Without estimates
    /// the overshoot chain cannot be checked and unit overshoot is assumed;
    /// dwell requirements do not apply to the hysteresis supervisor.
    pub fn violations(&self) -> Vec<Violation> {
        let unit;
        let betas = match &self.betas {
            Some(b) => b.as_slice(),
            None => {
                unit = vec![KLExp { a: 1.0, b: 1.0 }; self.family.mode_count()];
                unit.as_slice()
            }
        };
        validate_config(self.family.as_ref(), &self.config, betas)
            .into_iter()
            .filter(|v| {
                self.kind == SupervisorKind::Dwell
                    || !matches!(v, Violation::NonPositiveTMin { .. } | Violation::DwellBelowMinimum { .. })
            })
            .collect()
    }
}
