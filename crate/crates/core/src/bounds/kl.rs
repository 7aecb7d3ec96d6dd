//! Exponential class-KL estimates `β(s, r) = a·s·e^{−b·r}`, linear gains
//! `γ(s) = c·s`, and the closed-form times derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLExp {
    /// Overshoot coefficient, `β(s, 0) = a·s`.
    pub a: f64,
    /// Decay rate.
    pub b: f64,
}

impl KLExp {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::InvalidConfig(format!("overshoot a must be >= 1, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidConfig(format!("decay rate b must be > 0, got {b}")));
        }
        Ok(KLExp { a, b })
    }

    pub fn eval(&self, s: f64, r: f64) -> f64 {
        self.a * s * (-self.b * r).exp()
    }

    /// `χ(s) = β^{-1}(s, 0) = s / a`.
    pub fn chi(&self, s: f64) -> f64 {
        s / self.a
    }
}

/// Free-function form of [`KLExp::chi`].
pub fn chi(beta: &KLExp, s: f64) -> f64 {
    beta.chi(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainFn {
    pub c: f64,
}

impl GainFn {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidConfig(format!("gain must be >= 0, got {c}")));
        }
        Ok(GainFn { c })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.c * s
    }
}

/// Smallest `T >= 0` with `β(s, T) + margin = target`.
pub fn dwell_from_beta(beta: &KLExp, s: f64, target: f64, margin: f64) -> Result<f64> {
    let room = target - margin;
    if !(room > 0.0) {
        return Err(Error::Infeasible(format!(
            "dwell target {target} does not exceed margin {margin}"
        )));
    }
    Ok(decay_time(beta, s, room))
}

/// Time for the estimate `β(s, ·)` to reach `level`; zero when
/// `β(s, 0) <= level`.
pub fn time_to_level(beta: &KLExp, s: f64, level: f64) -> Result<f64> {
    if !(level > 0.0) {
        return Err(Error::Domain(format!("level must be positive, got {level}")));
    }
    Ok(decay_time(beta, s, level))
}

fn decay_time(beta: &KLExp, s: f64, level: f64) -> f64 {
    let start = beta.a * s;
    if start <= level {
        0.0
    } else {
        (start / level).ln() / beta.b
    }
}
