//! Fixed-step integration of the switched closed loop with bisection event
//! location.

mod event;
mod rk4;
mod simulate;
mod trajectory;

pub use event::{bisect_predicate, locate_crossing};
pub use rk4::{rk4_step, Rk4};
pub use simulate::{simulate, Switching};
pub use trajectory::Trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_EVENT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step_size: f64,
    #[serde(default = "default_tol")]
    pub event_tolerance: f64,
    pub t_end: f64,
}

fn default_tol() -> f64 {
    DEFAULT_EVENT_TOLERANCE
}

impl IntegratorConfig {
    pub fn new(step_size: f64, event_tolerance: f64, t_end: f64) -> Result<Self> {
        let cfg = IntegratorConfig {
            step_size,
            event_tolerance,
            t_end,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default step and tolerance up to `t_end`.
    pub fn until(t_end: f64) -> Result<Self> {
        Self::new(DEFAULT_STEP, DEFAULT_EVENT_TOLERANCE, t_end)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidConfig(format!("step size must be > 0, got {}", self.step_size)));
        }
        if !(self.event_tolerance > 0.0 && self.event_tolerance < self.step_size) {
            return Err(Error::InvalidConfig(format!(
                "event tolerance must lie in (0, step size), got {}",
                self.event_tolerance
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be > 0, got {}", self.t_end)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_checks() {
        assert!(IntegratorConfig::until(1.0).is_ok());
        assert!(IntegratorConfig::new(0.0, 1e-6, 1.0).is_err());
        assert!(IntegratorConfig::new(1e-3, 1e-3, 1.0).is_err());
        assert!(IntegratorConfig::new(1e-3, 1e-6, 0.0).is_err());
    }
}
