//! Disturbance signals and the generalized norm
//! `S[d, t0, t] = a ∫ ω(|d(τ)|) dτ + b sup |d(τ)|` over `[t0, t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::family::euclidean_norm;

/// A disturbance evaluated pointwise in time, so integrator stage points
/// can query it directly.
pub trait Disturbance: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, out: &mut [f64]);

    fn norm_at(&self, t: f64) -> f64 {
        let mut d = vec![0.0; self.dim()];
        self.eval(t, &mut d);
        euclidean_norm(&d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoDisturbance {
    pub dim: usize,
}

impl Disturbance for NoDisturbance {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _t: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn norm_at(&self, _t: f64) -> f64 {
        0.0
    }
}

/// One component `amplitude * sin(freq * t + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SineTerm {
    pub amplitude: f64,
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Componentwise sinusoids, one term per disturbance channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sinusoids {
    pub terms: Vec<SineTerm>,
}

impl Sinusoids {
    pub fn single(amplitude: f64, freq: f64) -> Self {
        Sinusoids {
            terms: vec![SineTerm {
                amplitude,
                freq,
                phase: 0.0,
            }],
        }
    }
}

impl Disturbance for Sinusoids {
    fn dim(&self) -> usize {
        self.terms.len()
    }

    fn eval(&self, t: f64, out: &mut [f64]) {
        for (term, o) in self.terms.iter().zip(out.iter_mut()) {
            *o = term.amplitude * (term.freq * t + term.phase).sin();
        }
    }
}

/// Closure-backed disturbance.
pub struct FnDisturbance<F> {
    dim: usize,
    f: F,
}

impl<F> FnDisturbance<F>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnDisturbance { dim, f }
    }
}

impl<F> Disturbance for FnDisturbance<F>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, out: &mut [f64]) {
        (self.f)(t, out)
    }
}

/// Class-K weight ω used inside the integral term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassK {
    #[default]
    Identity,
    Linear {
        gain: f64,
    },
    Power {
        exponent: f64,
    },
}

impl ClassK {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            ClassK::Identity => s,
            ClassK::Linear { gain } => gain * s,
            ClassK::Power { exponent } => s.powf(exponent),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedNormParams {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub omega: ClassK,
}

impl Default for GeneralizedNormParams {
    /// Sup norm: `a = 0`, `b = 1`, `ω = id`.
    fn default() -> Self {
        GeneralizedNormParams {
            a: 0.0,
            b: 1.0,
            omega: ClassK::Identity,
        }
    }
}

impl GeneralizedNormParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.b >= 0.0 && self.a + self.b > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "norm weights need a, b >= 0 and a + b > 0 (a = {}, b = {})",
                self.a, self.b
            )));
        }
        if self.omega.eval(0.0) != 0.0 {
            return Err(Error::InvalidConfig("omega(0) must be 0".into()));
        }
        let mut prev = 0.0;
        for k in 1..=200 {
            let s = 0.05 * k as f64;
            let w = self.omega.eval(s);
            if !(w > prev) {
                return Err(Error::InvalidConfig(format!(
                    "omega is not strictly increasing near s = {s}"
                )));
            }
            prev = w;
        }
        Ok(())
    }

    fn combine(&self, integral: f64, sup: f64) -> f64 {
        self.a * integral + self.b * sup
    }
}

/// Evaluate `S[d, t0, t]` on a grid anchored at `t0`.
///
/// The integral uses the composite trapezoid rule (the final panel ends
/// exactly at `t`); the supremum is the maximum over grid samples in the
/// right-open window `[t0, t)`.
pub fn s_norm(
    d: &dyn Disturbance,
    t0: f64,
    t: f64,
    params: &GeneralizedNormParams,
    grid: f64,
) -> Result<f64> {
    if !(t >= t0) {
        return Err(Error::Domain(format!("s_norm needs t >= t0 (t0 = {t0}, t = {t})")));
    }
    if !(grid > 0.0) {
        return Err(Error::Domain(format!("s_norm grid must be positive, got {grid}")));
    }
    let mut acc = SNormAccumulator::new(*params);
    let mut k = 0usize;
    loop {
        let tau = t0 + k as f64 * grid;
        if tau >= t {
            break;
        }
        acc.push(tau, d.norm_at(tau));
        k += 1;
    }
    acc.close(t, d.norm_at(t));
    let value = acc.value();
    if !value.is_finite() {
        return Err(Error::Domain("disturbance norm is not finite".into()));
    }
    Ok(value)
}

/// Running evaluation of `S` over an increasing sample sequence.
#[derive(Clone, Debug)]
pub struct SNormAccumulator {
    params: GeneralizedNormParams,
    integral: f64,
    sup: f64,
    last: Option<(f64, f64)>,
}

impl SNormAccumulator {
    pub fn new(params: GeneralizedNormParams) -> Self {
        SNormAccumulator {
            params,
            integral: 0.0,
            sup: 0.0,
            last: None,
        }
    }

    fn integrate_to(&mut self, t: f64, w: f64) {
        if let Some((tp, wp)) = self.last {
            self.integral += 0.5 * (t - tp) * (w + wp);
        }
        self.last = Some((t, w));
    }

    /// Add a sample that counts for both the integral and the supremum.
    pub fn push(&mut self, t: f64, norm_d: f64) {
        let w = self.params.omega.eval(norm_d);
        self.integrate_to(t, w);
        self.sup = self.sup.max(norm_d);
    }

    /// Add the right end of the window: integral only.
    fn close(&mut self, t: f64, norm_d: f64) {
        let w = self.params.omega.eval(norm_d);
        self.integrate_to(t, w);
    }

    pub fn value(&self) -> f64 {
        self.params.combine(self.integral, self.sup)
    }
}
