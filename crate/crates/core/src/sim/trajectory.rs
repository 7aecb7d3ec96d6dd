use serde::{Deserialize, Serialize};

/// Sampled closed-loop trajectory. All per-sample vectors have equal
/// length; `controls[k]` is empty when the family exposes no control.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub output_norms: Vec<f64>,
    /// Family mode active from each sample onwards.
    pub modes: Vec<usize>,
    /// Supervisor interval, `None` for fixed-mode runs.
    pub intervals: Vec<Option<usize>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// First sample time with `|y| <= level` after which the norm stays
    /// at or below `level`.
    pub fn settling_time(&self, level: f64) -> Option<f64> {
        let last_above = self.output_norms.iter().rposition(|&v| v > level);
        match last_above {
            None => self.times.first().copied(),
            Some(k) if k + 1 < self.len() => Some(self.times[k + 1]),
            Some(_) => None,
        }
    }

    /// First sample time with `|y| <= level`.
    pub fn first_time_below(&self, level: f64) -> Option<f64> {
        self.output_norms
            .iter()
            .position(|&v| v <= level)
            .map(|k| self.times[k])
    }

    pub fn max_output_norm(&self) -> f64 {
        self.output_norms.iter().copied().fold(0.0, f64::max)
    }

    /// Maximum of `|y_i|` over the run.
    pub fn peak_output_component(&self, i: usize) -> f64 {
        self.outputs.iter().map(|y| y[i].abs()).fold(0.0, f64::max)
    }

    /// Linear interpolation of the state at `t` inside the sampled span.
    pub fn state_at(&self, t: f64) -> Option<Vec<f64>> {
        let first = *self.times.first()?;
        if t < first || t > self.t_end() {
            return None;
        }
        let k = self.times.partition_point(|&s| s <= t);
        if k == self.len() {
            return self.states.last().cloned();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(
            self.states[k - 1]
                .iter()
                .zip(&self.states[k])
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trajectory {
        Trajectory {
            times: vec![0.0, 1.0, 2.0, 3.0],
            states: vec![vec![4.0], vec![2.0], vec![0.5], vec![0.2]],
            outputs: vec![vec![4.0], vec![-2.0], vec![0.5], vec![0.2]],
            controls: vec![vec![]; 4],
            output_norms: vec![4.0, 2.0, 0.5, 0.2],
            modes: vec![0; 4],
            intervals: vec![None; 4],
        }
    }

    #[test]
    fn queries() {
        let tr = sample();
        assert_eq!(tr.first_time_below(1.0), Some(2.0));
        assert_eq!(tr.settling_time(1.0), Some(2.0));
        assert_eq!(tr.settling_time(0.1), None);
        assert_eq!(tr.peak_output_component(0), 4.0);
        assert_eq!(tr.state_at(1.5), Some(vec![1.25]));
        assert_eq!(tr.state_at(3.0), Some(vec![0.2]));
        assert_eq!(tr.state_at(3.5), None);
    }
}
