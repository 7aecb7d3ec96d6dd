//! Seeded random scalar switched systems and batch checks of the
//! supervisor invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::kl::KLExp;
use crate::error::Result;
use crate::par::{self, Execution};
use crate::sim::{simulate, IntegratorConfig, Switching, Trajectory};
use crate::supervisor::SupervisorKind;
use crate::system::config::{default_chi, DwellTime, SupervisorConfig};
use crate::system::family::LinearFamily;
use crate::system::norm::{Disturbance, NoDisturbance, Sinusoids};
use crate::system::partition::Partition;
use crate::system::switchlog::SwitchLog;

/// Independent stream for instance `index` of a batch.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Scalar modes `dx/dt = −r_i x + d` under a supervisor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarInstance {
    pub rates: Vec<f64>,
    pub config: SupervisorConfig,
    pub kind: SupervisorKind,
    pub x0: f64,
    /// `None` for an undisturbed instance.
    pub disturbance: Option<Sinusoids>,
    pub t_end: f64,
}

impl ScalarInstance {
    pub fn family(&self) -> LinearFamily {
        LinearFamily::scalar(&self.rates)
    }

    pub fn run(&self, step: f64, event_tolerance: f64) -> Result<(Trajectory, SwitchLog)> {
        let cfg = IntegratorConfig::new(step, event_tolerance, self.t_end)?;
        let none = NoDisturbance { dim: 1 };
        let d: &dyn Disturbance = match &self.disturbance {
            Some(s) => s,
            None => &none,
        };
        let sw = Switching::Supervised {
            kind: self.kind,
            config: &self.config,
        };
        simulate(&self.family(), sw, &[self.x0], d, &cfg)
    }
}

fn random_partition(rng: &mut ChaCha8Rng, intervals: usize) -> Partition {
    let mut th = vec![0.0, rng.random_range(0.2..1.0)];
    while th.len() < intervals {
        let last = *th.last().expect("non-empty");
        th.push(last * rng.random_range(1.5..3.0));
    }
    Partition::new(th).expect("increasing thresholds")
}

fn signed(rng: &mut ChaCha8Rng, magnitude: f64) -> f64 {
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Multi-interval instance with one mode per interval. Lower intervals may
/// use unstable modes so the output keeps crossing thresholds; the top
/// mode is always stable. With `stable_only` every mode decays.
pub fn random_scalar_instance(
    rng: &mut ChaCha8Rng,
    kind: SupervisorKind,
    intervals: usize,
    stable_only: bool,
) -> ScalarInstance {
    let intervals = intervals.max(2);
    let partition = random_partition(rng, intervals);
    let top = partition.top();
    let rates: Vec<f64> = (0..=top)
        .map(|q| {
            if stable_only || q == top || rng.random_bool(0.5) {
                rng.random_range(0.5..3.0)
            } else {
                -rng.random_range(0.3..1.5)
            }
        })
        .collect();
    let chi = default_chi(&partition, rng.random_range(0.5..0.9)).expect("factor in range");
    let dwell = (0..=top)
        .map(|_| DwellTime::Constant {
            value: rng.random_range(0.05..0.4),
        })
        .collect();
    let delta_m = partition.lower(top);
    let magnitude = rng.random_range(0.05..2.0 * delta_m);
    let x0 = signed(rng, magnitude);
    let r_min = rates.iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    let disturbance = Sinusoids::single(
        rng.random_range(0.0..1.0) * delta_m * r_min,
        rng.random_range(0.3..3.0),
    );
    let config = SupervisorConfig::new(partition, (0..=top).collect(), chi, dwell).expect("consistent lengths");
    ScalarInstance {
        rates,
        config,
        kind,
        x0,
        disturbance: Some(disturbance),
        t_end: 15.0,
    }
}

/// Two intervals, an unstable base mode and a stable upper mode, so the
/// output cycles through both switch bands with transversal crossings.
pub fn random_two_mode_instance(rng: &mut ChaCha8Rng, kind: SupervisorKind) -> ScalarInstance {
    let partition = random_partition(rng, 2);
    let d1 = partition.lower(1);
    let rates = vec![-rng.random_range(0.3..1.5), rng.random_range(0.5..3.0)];
    let chi = default_chi(&partition, rng.random_range(0.5..0.9)).expect("factor in range");
    let dwell = vec![
        DwellTime::Constant {
            value: rng.random_range(0.05..0.3),
        },
        DwellTime::Constant {
            value: rng.random_range(0.05..0.3),
        },
    ];
    let magnitude = rng.random_range(0.2..1.8) * d1;
    let x0 = signed(rng, magnitude);
    let disturbance = Sinusoids::single(rng.random_range(0.0..0.1) * d1, rng.random_range(0.3..3.0));
    let config = SupervisorConfig::new(partition, vec![0, 1], chi, dwell).expect("consistent lengths");
    ScalarInstance {
        rates,
        config,
        kind,
        x0,
        disturbance: Some(disturbance),
        t_end: 8.0,
    }
}

/// Undisturbed three-interval instance whose dwell times come from
/// conservative exponential estimates `a_i ≥ 1`, `b_i ≤ r_i` of the true
/// decay. Returns the instance, the estimates and the initial interval.
pub fn random_convergence_instance(rng: &mut ChaCha8Rng) -> (ScalarInstance, Vec<KLExp>) {
    let rates: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..3.0)).collect();
    let betas: Vec<KLExp> = rates
        .iter()
        .map(|&r| KLExp::new(rng.random_range(1.2..3.0), r * rng.random_range(0.3..1.0)).expect("valid estimate"))
        .collect();
    let d1 = rng.random_range(0.2..1.0);
    // keep Δ_{q+1} above the overshoot of the interval below and above a_q·Δ_q
    let d2 = d1 * (betas[0].a.max(betas[1].a) + rng.random_range(0.5..2.0));
    let partition = Partition::new(vec![0.0, d1, d2]).expect("increasing thresholds");
    let config = SupervisorConfig::from_kl(partition, vec![0, 1, 2], &betas).expect("feasible construction");
    let magnitude = rng.random_range(0.6 * d1..4.0 * d2);
    let x0 = signed(rng, magnitude);
    let instance = ScalarInstance {
        rates,
        config,
        kind: SupervisorKind::Dwell,
        x0,
        disturbance: None,
        t_end: 0.0,
    };
    (instance, betas)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub runs: usize,
    pub switches: usize,
    pub violations: usize,
    pub details: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(parts: Vec<InvariantReport>) -> InvariantReport {
        parts.into_iter().fold(InvariantReport::default(), |mut acc, r| {
            acc.runs += r.runs;
            acc.switches += r.switches;
            acc.violations += r.violations;
            acc.details.extend(r.details);
            acc
        })
    }
}

/// Minimum inter-switch gap `t_min − 2·tol` across `runs` random
/// dwell-supervised instances.
pub fn dwell_gap_batch(seed: u64, runs: usize, step: f64, tol: f64, exec: Execution) -> Result<InvariantReport> {
    let idx: Vec<u64> = (0..runs as u64).collect();
    let parts = par::map(&idx, exec, |&i| -> Result<InvariantReport> {
        let mut rng = instance_rng(seed, i);
        let inst = random_scalar_instance(&mut rng, SupervisorKind::Dwell, 2 + (i as usize % 3), false);
        let (_, log) = inst.run(step, tol)?;
        let t_min = inst.config.t_min();
        let mut rep = InvariantReport {
            runs: 1,
            switches: log.len(),
            ..Default::default()
        };
        for w in log.events.windows(2) {
            let gap = w[1].t - w[0].t;
            if gap < t_min - 2.0 * tol {
                rep.violations += 1;
                rep.details.push(format!("run {i}: gap {gap} < t_min {t_min} at t = {}", w[1].t));
            }
        }
        Ok(rep)
    });
    Ok(InvariantReport::merge(parts.into_iter().collect::<Result<_>>()?))
}

/// Every hysteresis switch moves by exactly one interval.
pub fn adjacency_batch(seed: u64, runs: usize, step: f64, tol: f64, exec: Execution) -> Result<InvariantReport> {
    let idx: Vec<u64> = (0..runs as u64).collect();
    let parts = par::map(&idx, exec, |&i| -> Result<InvariantReport> {
        let mut rng = instance_rng(seed, i);
        let inst = random_scalar_instance(&mut rng, SupervisorKind::Hysteresis, 2 + (i as usize % 3), false);
        let (_, log) = inst.run(step, tol)?;
        let mut rep = InvariantReport {
            runs: 1,
            switches: log.len(),
            ..Default::default()
        };
        for e in &log.events {
            if e.from.abs_diff(e.to) != 1 {
                rep.violations += 1;
                rep.details.push(format!("run {i}: jump {} -> {} at t = {}", e.from, e.to, e.t));
            }
        }
        Ok(rep)
    });
    Ok(InvariantReport::merge(parts.into_iter().collect::<Result<_>>()?))
}
