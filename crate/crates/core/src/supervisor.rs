//! Switching-signal generators: the output-dependent dwell-time supervisor
//! and the adjacent-only hysteresis supervisor.
//!
//! The supervisor tracks the interval index `q`; the active dynamics are
//! `f_{θ_q}`. Stepping is pure: state in, state out.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::system::config::{in_switch_band, SupervisorConfig};
use crate::system::partition::interval_index;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupervisorKind {
    Dwell,
    Hysteresis,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupervisorState {
    pub q: usize,
    pub t_last_switch: f64,
    pub kind: SupervisorKind,
    /// `t_last_switch + T_q(|y(t_last_switch)|)`; unused by hysteresis.
    pub dwell_deadline: f64,
}

/// Initial interval from `|h(x(0))|`.
pub fn init_supervisor(kind: SupervisorKind, v0: f64, config: &SupervisorConfig) -> Result<SupervisorState> {
    init_supervisor_at(kind, 0.0, v0, config)
}

pub fn init_supervisor_at(
    kind: SupervisorKind,
    t0: f64,
    v0: f64,
    config: &SupervisorConfig,
) -> Result<SupervisorState> {
    let q = interval_index(v0, &config.partition)?;
    let dwell_deadline = match kind {
        SupervisorKind::Dwell => t0 + config.dwell_at(q, v0),
        SupervisorKind::Hysteresis => t0,
    };
    Ok(SupervisorState {
        q,
        t_last_switch: t0,
        kind,
        dwell_deadline,
    })
}

/// The interval the supervisor would switch to at `(t, v)`, if any.
pub fn target(state: &SupervisorState, t: f64, v: f64, config: &SupervisorConfig) -> Option<usize> {
    let q = state.q;
    match state.kind {
        SupervisorKind::Dwell => {
            if t < state.dwell_deadline {
                return None;
            }
            (0..=config.top()).find(|&k| k != q && in_switch_band(v, k, config))
        }
        SupervisorKind::Hysteresis => {
            let below = q.checked_sub(1);
            let above = (q < config.top()).then_some(q + 1);
            below
                .into_iter()
                .chain(above)
                .find(|&k| in_switch_band(v, k, config))
        }
    }
}

fn switch_to(state: &SupervisorState, k: usize, t: f64, v: f64, config: &SupervisorConfig) -> SupervisorState {
    let dwell_deadline = match state.kind {
        SupervisorKind::Dwell => t + config.dwell_at(k, v),
        SupervisorKind::Hysteresis => t,
    };
    SupervisorState {
        q: k,
        t_last_switch: t,
        kind: state.kind,
        dwell_deadline,
    }
}

/// Either kind, dispatched on `state.kind`.
pub fn step(state: &SupervisorState, t: f64, v: f64, config: &SupervisorConfig) -> (SupervisorState, bool) {
    match target(state, t, v, config) {
        Some(k) => (switch_to(state, k, t, v, config), true),
        None => (*state, false),
    }
}

pub fn dwell_step(state: &SupervisorState, t: f64, v: f64, config: &SupervisorConfig) -> (SupervisorState, bool) {
    debug_assert_eq!(state.kind, SupervisorKind::Dwell);
    step(state, t, v, config)
}

pub fn hysteresis_step(
    state: &SupervisorState,
    t: f64,
    v: f64,
    config: &SupervisorConfig,
) -> (SupervisorState, bool) {
    debug_assert_eq!(state.kind, SupervisorKind::Hysteresis);
    step(state, t, v, config)
}
