use crate::error::{Error, Result};
use crate::supervisor::{self, SupervisorKind, SupervisorState};
use crate::system::config::SupervisorConfig;
use crate::system::family::{euclidean_norm, ModeFamily};
use crate::system::norm::Disturbance;
use crate::system::switchlog::SwitchLog;

use super::event::bisect_predicate;
use super::rk4::Rk4;
use super::trajectory::Trajectory;
use super::IntegratorConfig;

/// Sub-points examined inside a step when the output passes close to a
/// switch band without ending inside it.
const GRAZE_SCAN_POINTS: usize = 8;

#[derive(Clone, Copy, Debug)]
pub enum Switching<'a> {
    /// One family mode for the whole run.
    Fixed(usize),
    /// Supervisor initialized from `|h(x0)|` at `t = 0`.
    Supervised {
        kind: SupervisorKind,
        config: &'a SupervisorConfig,
    },
    /// Supervisor starting from an explicit state.
    Resume {
        state: SupervisorState,
        config: &'a SupervisorConfig,
    },
}

struct Flow<'a> {
    family: &'a dyn ModeFamily,
    d: &'a dyn Disturbance,
    rk: Rk4,
    dbuf: Vec<f64>,
}

impl Flow<'_> {
    fn advance(&mut self, mode: usize, t: f64, x: &[f64], h: f64, out: &mut [f64]) -> Result<()> {
        let Flow { family, d, rk, dbuf } = self;
        let mut f = |s: f64, x: &[f64], dx: &mut [f64]| {
            d.eval(s, dbuf);
            family.vector_field(mode, x, dbuf, dx);
        };
        rk.step(&mut f, t, x, h, out)
    }

    fn record(&self, tr: &mut Trajectory, t: f64, x: &[f64], mode: usize, interval: Option<usize>) {
        let mut y = vec![0.0; self.family.output_dim()];
        self.family.output(x, &mut y);
        let mut u = vec![0.0; self.family.control_dim()];
        self.family.control(mode, x, &mut u);
        tr.times.push(t);
        tr.states.push(x.to_vec());
        tr.output_norms.push(euclidean_norm(&y));
        tr.outputs.push(y);
        tr.controls.push(u);
        tr.modes.push(mode);
        tr.intervals.push(interval);
    }
}

fn check_inputs(
    family: &dyn ModeFamily,
    switching: &Switching<'_>,
    x0: &[f64],
    d: &dyn Disturbance,
    cfg: &IntegratorConfig,
) -> Result<()> {
    cfg.validate()?;
    if x0.len() != family.state_dim() {
        return Err(Error::InvalidConfig(format!(
            "initial state has {} components, family expects {}",
            x0.len(),
            family.state_dim()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("initial state is not finite".into()));
    }
    if d.dim() != family.disturbance_dim() {
        return Err(Error::InvalidConfig(format!(
            "disturbance has {} channels, family expects {}",
            d.dim(),
            family.disturbance_dim()
        )));
    }
    let bad_mode = |m: usize| {
        Error::InvalidConfig(format!("mode {m} out of range (family has {})", family.mode_count()))
    };
    match switching {
        Switching::Fixed(m) if *m >= family.mode_count() => return Err(bad_mode(*m)),
        Switching::Fixed(_) => {}
        Switching::Supervised { config, .. } | Switching::Resume { config, .. } => {
            let n = config.top() + 1;
            if config.modes.len() != n || config.chi.len() != n || config.dwell.len() != n {
                return Err(Error::InvalidConfig("supervisor config has inconsistent lengths".into()));
            }
            if let Some(&m) = config.modes.iter().find(|&&m| m >= family.mode_count()) {
                return Err(bad_mode(m));
            }
            if let Switching::Resume { state, .. } = switching {
                if state.q > config.top() {
                    return Err(Error::InvalidConfig(format!("interval {} out of range", state.q)));
                }
            }
        }
    }
    Ok(())
}

/// Ratio between the bracket width actually bisected to and the requested
/// event tolerance.
const EVENT_REFINEMENT: f64 = 1.0 / 1024.0;

/// Integrate the switched closed loop over `[0, cfg.t_end]`.
///
/// The supervisor condition is checked after every step. A switch inside a
/// step is located by bisection on re-integrated sub-steps, the step is cut
/// at the switch time and the new mode starts there from the same state.
pub fn simulate(
    family: &dyn ModeFamily,
    switching: Switching<'_>,
    x0: &[f64],
    d: &dyn Disturbance,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory, SwitchLog)> {
    check_inputs(family, &switching, x0, d, cfg)?;
    let n = x0.len();
    let mut flow = Flow {
        family,
        d,
        rk: Rk4::new(n),
        dbuf: vec![0.0; family.disturbance_dim()],
    };

    let (mut sup, config) = match switching {
        Switching::Fixed(_) => (None, None),
        Switching::Supervised { kind, config } => {
            let v0 = family.output_norm(x0);
            (Some(supervisor::init_supervisor(kind, v0, config)?), Some(config))
        }
        Switching::Resume { state, config } => (Some(state), Some(config)),
    };
    let mode_of = |s: &Option<SupervisorState>| match (s, config, switching) {
        (Some(s), Some(c), _) => c.mode(s.q),
        (_, _, Switching::Fixed(m)) => m,
        _ => unreachable!("supervised run without a config"),
    };

    let mut tr = Trajectory::default();
    let mut log = SwitchLog::new();
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut mode = mode_of(&sup);
    flow.record(&mut tr, t, &x, mode, sup.map(|s| s.q));

    let h = cfg.step_size;
    // Each switch starts the next segment from the located state, so lags
    // add up along a chain of switches; bisect well below the tolerance.
    let tol = cfg.event_tolerance * EVENT_REFINEMENT;
    let mut x_new = vec![0.0; n];
    let mut x_probe = vec![0.0; n];
    let mut v_prev_change = 0.0_f64;

    while t < cfg.t_end {
        let remaining = cfg.t_end - t;
        let (mut h_step, mut t_new) = if remaining <= h * (1.0 + 1e-9) {
            (remaining, cfg.t_end)
        } else {
            (h, t + h)
        };
        let mut at_deadline = false;
        if let Some(s) = &sup {
            if s.kind == SupervisorKind::Dwell && s.dwell_deadline > t && s.dwell_deadline <= t_new {
                h_step = s.dwell_deadline - t;
                t_new = s.dwell_deadline;
                at_deadline = true;
            }
        }
        flow.advance(mode, t, &x, h_step, &mut x_new)?;
        let v_new = family.output_norm(&x_new);

        if let (Some(s), Some(c)) = (sup, config) {
            let v_old = *tr.output_norms.last().expect("trajectory has a sample");
            let event_time = if supervisor::target(&s, t_new, v_new, c).is_some() {
                if at_deadline {
                    // the gate blocks every earlier instant in this step
                    Some(t_new)
                } else {
                    let mut pred = |tau: f64| -> Result<bool> {
                        flow.advance(mode, t, &x, tau - t, &mut x_probe)?;
                        Ok(supervisor::target(&s, tau, family.output_norm(&x_probe), c).is_some())
                    };
                    Some(bisect_predicate(&mut pred, t, t_new, tol)?)
                }
            } else if !at_deadline && near_candidate_band(&s, c, t_new, v_old, v_new, v_prev_change) {
                graze_scan(&mut flow, mode, t, &x, t_new, &s, c, tol, &mut x_probe)?
            } else {
                None
            };

            if let Some(tau) = event_time {
                let x_tau = if tau == t_new {
                    x_new.clone()
                } else {
                    flow.advance(mode, t, &x, tau - t, &mut x_probe)?;
                    x_probe.clone()
                };
                let v_tau = family.output_norm(&x_tau);
                let (next, switched) = supervisor::step(&s, tau, v_tau, c);
                debug_assert!(switched, "located event must switch");
                if switched {
                    log.push(tau, s.q, next.q);
                    sup = Some(next);
                    mode = c.mode(next.q);
                }
                v_prev_change = (v_tau - v_old).abs();
                t = tau;
                x = x_tau;
                flow.record(&mut tr, t, &x, mode, sup.map(|s| s.q));
                continue;
            }
            v_prev_change = (v_new - v_old).abs();
        }

        t = t_new;
        std::mem::swap(&mut x, &mut x_new);
        flow.record(&mut tr, t, &x, mode, sup.map(|s| s.q));
    }
    Ok((tr, log))
}

/// Whether some band the supervisor could switch into lies within reach
/// of the output range covered by this step.
fn near_candidate_band(
    s: &SupervisorState,
    c: &SupervisorConfig,
    t_new: f64,
    v_old: f64,
    v_new: f64,
    v_prev_change: f64,
) -> bool {
    if s.kind == SupervisorKind::Dwell && t_new < s.dwell_deadline {
        return false;
    }
    let reach = 2.0 * (v_new - v_old).abs() + v_prev_change;
    let lo = v_old.min(v_new) - reach;
    let hi = v_old.max(v_new) + reach;
    let candidates: Vec<usize> = match s.kind {
        SupervisorKind::Dwell => (0..=c.top()).filter(|&k| k != s.q).collect(),
        SupervisorKind::Hysteresis => [s.q.checked_sub(1), (s.q < c.top()).then_some(s.q + 1)]
            .into_iter()
            .flatten()
            .collect(),
    };
    candidates
        .into_iter()
        .any(|k| c.partition.lower(k) <= hi && c.chi[k] > lo)
}

#[allow(clippy::too_many_arguments)]
fn graze_scan(
    flow: &mut Flow<'_>,
    mode: usize,
    t: f64,
    x: &[f64],
    t_new: f64,
    s: &SupervisorState,
    c: &SupervisorConfig,
    tol: f64,
    probe: &mut [f64],
) -> Result<Option<f64>> {
    let family = flow.family;
    let mut pred = |tau: f64| -> Result<bool> {
        flow.advance(mode, t, x, tau - t, probe)?;
        Ok(supervisor::target(s, tau, family.output_norm(probe), c).is_some())
    };
    let dt = (t_new - t) / GRAZE_SCAN_POINTS as f64;
    let mut lo = t;
    for j in 1..GRAZE_SCAN_POINTS {
        let tau = t + j as f64 * dt;
        if pred(tau)? {
            return Ok(Some(bisect_predicate(&mut pred, lo, tau, tol)?));
        }
        lo = tau;
    }
    Ok(None)
}
