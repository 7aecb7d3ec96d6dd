//! Supervisor configuration: partition, mode assignment θ_q, switch-band
//! caps χ_q and dwell-time functions T_q.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::kl::{dwell_from_beta, KLExp};
use crate::error::{Error, Result};
use crate::system::family::ModeFamily;
use crate::system::partition::Partition;

/// The top-interval dwell function is evaluated at `min(v, TOP_DWELL_CAP · Δ_M)`.
pub const TOP_DWELL_CAP: f64 = 10.0;

/// Default χ for an interval when no KL data is available: a fraction of
/// the interval span above `Δ_q`.
pub const DEFAULT_CHI_FACTOR: f64 = 0.8;

/// Dwell-time function `T_q` on `[Δ_q, Δ_{q+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DwellTime {
    Constant {
        value: f64,
    },
    /// `T(s) = max(0, ln(a·s / (target − margin)) / b)`, the time for
    /// `a·s·e^{−b·T} + margin` to reach `target`.
    Exponential {
        a: f64,
        b: f64,
        target: f64,
        #[serde(default)]
        margin: f64,
    },
}

impl DwellTime {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            DwellTime::Constant { value } => value,
            DwellTime::Exponential {
                a,
                b,
                target,
                margin,
            } => dwell_from_beta(&KLExp { a, b }, s, target, margin).unwrap_or(f64::INFINITY),
        }
    }

    /// Greatest lower bound on `[lo, hi)`; both variants are non-decreasing
    /// in `s`.
    pub fn infimum(&self, lo: f64) -> f64 {
        self.eval(lo)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupervisorConfig {
    pub partition: Partition,
    /// θ_q, the family mode active on interval q.
    pub modes: Vec<usize>,
    /// χ_q, the upper end of the switch band `[Δ_q, χ_q)`.
    pub chi: Vec<f64>,
    pub dwell: Vec<DwellTime>,
    /// Configured lower bound on every T_q; derived from `dwell` when absent.
    #[serde(default)]
    pub t_min: Option<f64>,
    /// Allow `T_0 ≡ 0` (the base interval has no dwell requirement).
    #[serde(default)]
    pub zero_base_dwell: bool,
}

impl SupervisorConfig {
    pub fn new(
        partition: Partition,
        modes: Vec<usize>,
        chi: Vec<f64>,
        dwell: Vec<DwellTime>,
    ) -> Result<Self> {
        let cfg = SupervisorConfig {
            partition,
            modes,
            chi,
            dwell,
            t_min: None,
            zero_base_dwell: false,
        };
        cfg.check_shape()?;
        Ok(cfg)
    }

    /// Same dwell everywhere and χ placed at `factor` of each interval span.
    pub fn with_constant_dwell(
        partition: Partition,
        modes: Vec<usize>,
        dwell: f64,
        chi_factor: f64,
    ) -> Result<Self> {
        let chi = default_chi(&partition, chi_factor)?;
        let n = partition.top() + 1;
        Self::new(partition, modes, chi, vec![DwellTime::Constant { value: dwell }; n])
    }

    /// Bands and dwell times built from per-mode exponential estimates:
    /// `χ_q = Δ_{q+1} / a_{θ_q}`, `T_0` solves `β_{θ_0}(Δ_1, T_0) = Δ_1 / 2`,
    /// and `T_q(s)` solves `β_{θ_q}(s, T_q) = χ_{q−1}` for `q > 0`.
    pub fn from_kl(partition: Partition, modes: Vec<usize>, betas: &[KLExp]) -> Result<Self> {
        let zeros = vec![0.0; partition.top() + 1];
        Self::from_kl_with_margins(partition, modes, betas, &zeros)
    }

    /// As [`from_kl`](Self::from_kl), with disturbance margins `γ(D_q)`
    /// subtracted from every dwell target.
    pub fn from_kl_with_margins(
        partition: Partition,
        modes: Vec<usize>,
        betas: &[KLExp],
        margins: &[f64],
    ) -> Result<Self> {
        let top = partition.top();
        if top == 0 {
            return Err(Error::InvalidConfig("KL construction needs at least two intervals".into()));
        }
        if modes.len() != top + 1 || margins.len() != top + 1 {
            return Err(Error::InvalidConfig("one mode and one margin per interval".into()));
        }
        let beta_of = |q: usize| -> Result<KLExp> {
            betas.get(modes[q]).copied().ok_or_else(|| {
                Error::InvalidConfig(format!("no KL estimate for mode {}", modes[q]))
            })
        };
        let mut chi = Vec::with_capacity(top + 1);
        for q in 0..top {
            chi.push(beta_of(q)?.chi(partition.upper(q)));
        }
        chi.push(2.0 * partition.lower(top));

        let mut dwell = Vec::with_capacity(top + 1);
        let b0 = beta_of(0)?;
        let d1 = partition.upper(0);
        dwell.push(DwellTime::Constant {
            value: dwell_from_beta(&b0, d1, 0.5 * d1, margins[0])?,
        });
        for q in 1..=top {
            let beta = beta_of(q)?;
            if !(chi[q - 1] > margins[q]) {
                return Err(Error::Infeasible(format!(
                    "margin {} leaves no room below chi_{} = {}",
                    margins[q],
                    q - 1,
                    chi[q - 1]
                )));
            }
            dwell.push(DwellTime::Exponential {
                a: beta.a,
                b: beta.b,
                target: chi[q - 1],
                margin: margins[q],
            });
        }
        Self::new(partition, modes, chi, dwell)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.partition.top() + 1;
        if self.modes.len() != n || self.chi.len() != n || self.dwell.len() != n {
            return Err(Error::InvalidConfig(format!(
                "expected {n} entries for modes, chi and dwell (got {}, {}, {})",
                self.modes.len(),
                self.chi.len(),
                self.dwell.len()
            )));
        }
        Ok(())
    }

    /// `M`.
    pub fn top(&self) -> usize {
        self.partition.top()
    }

    pub fn mode(&self, q: usize) -> usize {
        self.modes[q]
    }

    /// Dwell time after switching into interval `q` at output norm `v`.
    pub fn dwell_at(&self, q: usize, v: f64) -> f64 {
        if q == 0 && self.zero_base_dwell {
            return 0.0;
        }
        self.dwell[q].eval(self.clamp_to_domain(q, v))
    }

    /// Clamp `v` into `[Δ_q, Δ_{q+1}]`, capping the open top interval at
    /// `TOP_DWELL_CAP · Δ_M`.
    pub fn clamp_to_domain(&self, q: usize, v: f64) -> f64 {
        let lo = self.partition.lower(q);
        let hi = if q == self.top() {
            TOP_DWELL_CAP * self.partition.lower(q)
        } else {
            self.partition.upper(q)
        };
        v.max(lo).min(hi.max(lo))
    }

    /// Infimum of every active `T_q` over its domain.
    pub fn dwell_infimum(&self) -> f64 {
        (0..=self.top())
            .filter(|&q| !(q == 0 && self.zero_base_dwell))
            .map(|q| self.dwell[q].infimum(self.partition.lower(q)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Configured `t_min`, or the dwell infimum when none is set.
    pub fn t_min(&self) -> f64 {
        self.t_min.unwrap_or_else(|| self.dwell_infimum())
    }

    /// Value of `T_q` at the right end of its interval (used by the
    /// convergence-time estimates).
    pub fn dwell_at_upper(&self, q: usize) -> f64 {
        let v = if q == self.top() {
            TOP_DWELL_CAP * self.partition.lower(q)
        } else {
            self.partition.upper(q)
        };
        self.dwell_at(q, v)
    }
}

/// χ_q = Δ_q + factor·(Δ_{q+1} − Δ_q) for q < M, and χ_M = 2·Δ_M.
pub fn default_chi(partition: &Partition, factor: f64) -> Result<Vec<f64>> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::InvalidConfig(format!("chi factor must lie in (0, 1), got {factor}")));
    }
    let top = partition.top();
    let mut chi: Vec<f64> = (0..top)
        .map(|q| {
            let lo = partition.lower(q);
            lo + factor * (partition.upper(q) - lo)
        })
        .collect();
    chi.push(2.0 * partition.lower(top));
    Ok(chi)
}

/// True iff `v ∈ [Δ_k, χ_k)`.
pub fn in_switch_band(v: f64, k: usize, config: &SupervisorConfig) -> bool {
    v >= config.partition.lower(k) && v < config.chi[k]
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ShapeMismatch(String),
    UnknownMode { q: usize, mode: usize },
    MissingBeta { mode: usize },
    /// `β_{θ_q}(Δ_{q+1}, 0) > Δ_{q+2}`.
    OvershootChain { q: usize, overshoot: f64, next_threshold: f64 },
    ChiOutOfBand { q: usize, chi: f64, lo: f64, hi: f64 },
    NonPositiveTMin { t_min: f64 },
    DwellBelowMinimum { q: usize, infimum: f64, t_min: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ShapeMismatch(msg) => write!(f, "{msg}"),
            Violation::UnknownMode { q, mode } => {
                write!(f, "interval {q} assigns mode {mode}, which the family does not have")
            }
            Violation::MissingBeta { mode } => write!(f, "no KL estimate for mode {mode}"),
            Violation::OvershootChain {
                q,
                overshoot,
                next_threshold,
            } => write!(
                f,
                "interval {q}: overshoot {overshoot} exceeds next threshold {next_threshold}"
            ),
            Violation::ChiOutOfBand { q, chi, lo, hi } => {
                write!(f, "interval {q}: chi {chi} not inside ({lo}, {hi})")
            }
            Violation::NonPositiveTMin { t_min } => write!(f, "t_min = {t_min} is not positive"),
            Violation::DwellBelowMinimum { q, infimum, t_min } => {
                write!(f, "interval {q}: dwell infimum {infimum} is below t_min {t_min}")
            }
        }
    }
}

/// Check the standing assumptions on a configuration. An empty result
/// means the configuration is admissible.
pub fn validate_config(
    family: &dyn ModeFamily,
    config: &SupervisorConfig,
    betas: &[KLExp],
) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Err(e) = config.check_shape() {
        out.push(Violation::ShapeMismatch(e.to_string()));
        return out;
    }
    let top = config.top();
    let p = &config.partition;

    for (q, &mode) in config.modes.iter().enumerate() {
        if mode >= family.mode_count() {
            out.push(Violation::UnknownMode { q, mode });
        } else if mode >= betas.len() && !out.contains(&Violation::MissingBeta { mode }) {
            out.push(Violation::MissingBeta { mode });
        }
    }

    for q in 0..top {
        let Some(beta) = betas.get(config.modes[q]) else {
            continue;
        };
        let overshoot = beta.eval(p.upper(q), 0.0);
        let next_threshold = p.upper(q + 1);
        if overshoot > next_threshold {
            out.push(Violation::OvershootChain {
                q,
                overshoot,
                next_threshold,
            });
        }
    }

    for q in 0..=top {
        let (lo, hi) = (p.lower(q), p.upper(q));
        let chi = config.chi[q];
        if !(chi > lo && chi < hi && chi.is_finite()) {
            out.push(Violation::ChiOutOfBand { q, chi, lo, hi });
        }
    }

    let t_min = config.t_min();
    if !(t_min > 0.0) {
        out.push(Violation::NonPositiveTMin { t_min });
    }
    for q in 0..=top {
        if q == 0 && config.zero_base_dwell {
            continue;
        }
        let infimum = config.dwell[q].infimum(p.lower(q));
        if infimum < t_min {
            out.push(Violation::DwellBelowMinimum { q, infimum, t_min });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::family::LinearFamily;

    fn band_config() -> SupervisorConfig {
        let p = Partition::new(vec![0.0, 0.1, 2.0, 5.0]).unwrap();
        SupervisorConfig::new(
            p,
            vec![0, 1, 0, 2],
            vec![0.05, 1.0, 3.0, 8.0],
            vec![DwellTime::Constant { value: 0.01 }; 4],
        )
        .unwrap()
    }

    #[test]
    fn switch_band_membership() {
        let cfg = band_config();
        assert!(in_switch_band(0.5, 1, &cfg));
        assert!(!in_switch_band(1.5, 1, &cfg));
        assert!(!in_switch_band(0.09, 1, &cfg));
        assert!(!in_switch_band(1.0, 1, &cfg));
        assert!(in_switch_band(0.1, 1, &cfg));
    }

    #[test]
    fn identity_overshoot_is_admissible() {
        let fam = LinearFamily::scalar(&[1.0, 2.0, 3.0]);
        let cfg = band_config();
        let betas = vec![KLExp::new(1.0, 1.0).unwrap(); 3];
        assert!(validate_config(&fam, &cfg, &betas).is_empty());
    }

    #[test]
    fn overshoot_chain_violation() {
        let fam = LinearFamily::scalar(&[1.0]);
        let p = Partition::new(vec![0.0, 1.0, 2.0, 10.0]).unwrap();
        let cfg = SupervisorConfig::new(
            p,
            vec![0; 4],
            vec![0.5, 1.5, 5.0, 20.0],
            vec![DwellTime::Constant { value: 0.1 }; 4],
        )
        .unwrap();
        let betas = [KLExp::new(3.0, 1.0).unwrap()];
        let v = validate_config(&fam, &cfg, &betas);
        // 3·Δ_1 = 3 > Δ_2 = 2; 3·Δ_2 = 6 <= Δ_3 = 10; 3·Δ_3 has Δ_4 = ∞
        assert_eq!(
            v,
            vec![Violation::OvershootChain {
                q: 0,
                overshoot: 3.0,
                next_threshold: 2.0
            }]
        );
    }

    #[test]
    fn band_and_dwell_violations() {
        let fam = LinearFamily::scalar(&[1.0]);
        let p = Partition::new(vec![0.0, 1.0, 2.0]).unwrap();
        let mut cfg = SupervisorConfig::new(
            p,
            vec![0, 0, 0],
            vec![1.0, 1.5, 3.0],
            vec![
                DwellTime::Constant { value: 0.0 },
                DwellTime::Constant { value: 0.2 },
                DwellTime::Constant { value: 0.2 },
            ],
        )
        .unwrap();
        let betas = [KLExp::new(1.0, 1.0).unwrap()];
        let v = validate_config(&fam, &cfg, &betas);
        assert!(v.contains(&Violation::ChiOutOfBand {
            q: 0,
            chi: 1.0,
            lo: 0.0,
            hi: 1.0
        }));
        assert!(v.contains(&Violation::NonPositiveTMin { t_min: 0.0 }));

        cfg.zero_base_dwell = true;
        cfg.chi[0] = 0.5;
        assert!(validate_config(&fam, &cfg, &betas).is_empty());
        assert_eq!(cfg.dwell_at(0, 0.3), 0.0);
        assert_eq!(cfg.t_min(), 0.2);
    }

    #[test]
    fn unknown_mode_and_missing_beta() {
        let fam = LinearFamily::scalar(&[1.0, 2.0]);
        let mut cfg = band_config();
        cfg.modes = vec![0, 1, 0, 1];
        let v = validate_config(&fam, &cfg, &[KLExp::new(1.0, 1.0).unwrap()]);
        assert!(v.contains(&Violation::MissingBeta { mode: 1 }));
        cfg.modes[3] = 7;
        let v = validate_config(&fam, &cfg, &[KLExp::new(1.0, 1.0).unwrap(); 2]);
        assert_eq!(v, vec![Violation::UnknownMode { q: 3, mode: 7 }]);
    }

    #[test]
    fn default_chi_bands() {
        let p = Partition::new(vec![0.0, 0.1, 1.0, 5.0]).unwrap();
        let chi = default_chi(&p, 0.8).unwrap();
        let expected = [0.08, 0.82, 4.2, 10.0];
        for (c, e) in chi.iter().zip(expected) {
            assert!((c - e).abs() < 1e-12);
        }
        assert!(default_chi(&p, 1.0).is_err());
    }

    #[test]
    fn kl_construction() {
        let p = Partition::new(vec![0.0, 1.0, 4.0, 16.0]).unwrap();
        let betas = [KLExp::new(2.0, 1.0).unwrap(), KLExp::new(1.5, 0.5).unwrap()];
        let cfg = SupervisorConfig::from_kl(p, vec![0, 1, 0, 1], &betas).unwrap();
        assert_eq!(cfg.chi, vec![0.5, 4.0 / 1.5, 8.0, 32.0]);
        // β_0(Δ_1, T_0) = Δ_1 / 2  =>  T_0 = ln(2·a_0)
        assert!((cfg.dwell_at(0, 0.3) - 4.0_f64.ln()).abs() < 1e-12);
        // β_1(s, T_1(s)) = χ_0
        let s = 2.5;
        let t1 = cfg.dwell_at(1, s);
        assert!((betas[1].eval(s, t1) - 0.5).abs() < 1e-12);
        let fam = LinearFamily::scalar(&[1.0, 0.5]);
        assert!(validate_config(&fam, &cfg, &betas).is_empty());
        // infimum sits at the left end of each interval
        let expect_t1 = (1.5_f64 * 1.0 / 0.5).ln() / 0.5;
        assert!((cfg.dwell[1].infimum(1.0) - expect_t1).abs() < 1e-12);
    }

    #[test]
    fn top_interval_cap() {
        let cfg = band_config();
        assert_eq!(cfg.clamp_to_domain(3, 1e6), 50.0);
        assert_eq!(cfg.clamp_to_domain(1, 0.0999), 0.1);
        assert_eq!(cfg.clamp_to_domain(1, 2.5), 2.0);
    }

    #[test]
    fn json_round_trip() {
        let cfg = band_config();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: SupervisorConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
    }
}
