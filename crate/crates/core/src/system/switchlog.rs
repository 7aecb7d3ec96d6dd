use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub t: f64,
    pub from: usize,
    pub to: usize,
}

/// Time-stamped interval changes of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SwitchLog {
    pub events: Vec<SwitchEvent>,
    /// Chatter bound `N_0` used by the average dwell-time check.
    pub n0: u32,
}

impl SwitchLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, from: usize, to: usize) {
        debug_assert!(self.events.last().is_none_or(|e| e.t < t), "switch times must increase");
        self.events.push(SwitchEvent { t, from, to });
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.t)
    }

    /// Smallest gap between consecutive switches, if there are two or more.
    pub fn min_gap(&self) -> Option<f64> {
        self.events
            .windows(2)
            .map(|w| w[1].t - w[0].t)
            .min_by(f64::total_cmp)
    }
}

/// Number of switches with `t1 <= t_j < t2`.
pub fn count_switches(log: &SwitchLog, t1: f64, t2: f64) -> usize {
    let lo = log.events.partition_point(|e| e.t < t1);
    let hi = log.events.partition_point(|e| e.t < t2);
    hi.saturating_sub(lo)
}

/// Checks `N_[t1, t2) <= N_0 + (t2 − t1) / τ_D` over every window.
///
/// The worst windows start at a switch and end just after another, so
/// only those pairs are examined.
pub fn average_dwell(log: &SwitchLog, tau_d: f64, n0: u32) -> bool {
    let ev = &log.events;
    for i in 0..ev.len() {
        for j in i..ev.len() {
            let n = (j - i + 1) as f64;
            let span = ev[j].t - ev[i].t;
            if n > n0 as f64 + span / tau_d + 1e-9 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn log_at(times: &[f64]) -> SwitchLog {
        let mut log = SwitchLog::new();
        for (k, &t) in times.iter().enumerate() {
            log.push(t, k, k + 1);
        }
        log
    }

    #[test]
    fn empty_log() {
        let log = SwitchLog::new();
        assert_eq!(count_switches(&log, 0.0, 10.0), 0);
        assert!(average_dwell(&log, 1e-6, 0));
    }

    #[test]
    fn half_open_window() {
        let log = log_at(&[1.0, 2.0, 3.0]);
        assert_eq!(count_switches(&log, 0.0, 2.5), 2);
        assert_eq!(count_switches(&log, 1.0, 2.0), 1);
        assert_eq!(count_switches(&log, 3.0, 3.0), 0);
    }

    #[test]
    fn average_dwell_limits() {
        let log = log_at(&[0.0, 0.01, 0.02, 0.03]);
        assert!(average_dwell(&log, 0.01, 1));
        assert!(!average_dwell(&log, 0.02, 1));
        assert!(!average_dwell(&log, 0.02, 2));
        assert!(average_dwell(&log, 0.02, 3));
        assert!((log.min_gap().unwrap() - 0.01).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn counting_is_additive(mut ts in prop::collection::vec(0.0f64..10.0, 0..30),
                                a in 0.0f64..3.0, b in 3.0f64..6.0, c in 6.0f64..12.0) {
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            let log = log_at(&ts);
            prop_assert_eq!(
                count_switches(&log, a, b) + count_switches(&log, b, c),
                count_switches(&log, a, c)
            );
        }
    }
}
