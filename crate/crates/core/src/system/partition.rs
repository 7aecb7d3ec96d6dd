use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output-norm thresholds `0 = Δ_0 < Δ_1 < … < Δ_M`; `Δ_{M+1} = +∞` is
/// implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    thresholds: Vec<f64>,
}

impl Partition {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.first() != Some(&0.0) {
            return Err(Error::InvalidConfig("partition must start at 0".into()));
        }
        for w in thresholds.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "partition thresholds must be finite and strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Partition { thresholds })
    }

    /// Index of the top interval, `M`.
    pub fn top(&self) -> usize {
        self.thresholds.len() - 1
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// `Δ_q`.
    pub fn lower(&self, q: usize) -> f64 {
        self.thresholds[q]
    }

    /// `Δ_{q+1}`, infinite for the top interval.
    pub fn upper(&self, q: usize) -> f64 {
        self.thresholds.get(q + 1).copied().unwrap_or(f64::INFINITY)
    }

    /// Membership predicate `v ∈ [Δ_q, Δ_{q+1})`.
    pub fn contains(&self, q: usize, v: f64) -> bool {
        v >= self.lower(q) && v < self.upper(q)
    }
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Self {
        p.thresholds
    }
}

/// The unique `q` with `v ∈ [Δ_q, Δ_{q+1})`.
pub fn interval_index(v: f64, partition: &Partition) -> Result<usize> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("output norm must be finite and >= 0, got {v}")));
    }
    // number of thresholds <= v, minus one for Δ_0
    Ok(partition.thresholds.partition_point(|&d| d <= v) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pendulum() -> Partition {
        Partition::new(vec![0.0, 0.1, 2.0, 5.0]).unwrap()
    }

    #[test]
    fn indices() {
        let p = pendulum();
        assert_eq!(interval_index(0.05, &p).unwrap(), 0);
        assert_eq!(interval_index(7.0, &p).unwrap(), 3);
        assert_eq!(interval_index(0.1, &p).unwrap(), 1);
        assert_eq!(interval_index(0.0, &p).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_norms() {
        let p = pendulum();
        assert!(interval_index(-0.1, &p).is_err());
        assert!(interval_index(f64::NAN, &p).is_err());
        assert!(interval_index(f64::INFINITY, &p).is_err());
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Partition::new(vec![0.1, 1.0]).is_err());
        assert!(Partition::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert!(serde_json::from_str::<Partition>("[0.0, 2.0, 1.0]").is_err());
    }

    proptest! {
        #[test]
        fn exactly_one_interval(steps in prop::collection::vec(0.01f64..10.0, 1..6), v in 0.0f64..100.0) {
            let mut th = vec![0.0];
            for s in steps {
                let last = *th.last().unwrap();
                th.push(last + s);
            }
            let p = Partition::new(th).unwrap();
            let q = interval_index(v, &p).unwrap();
            prop_assert!(p.lower(q) <= v && v < p.upper(q));
            let hits = (0..=p.top()).filter(|&k| p.contains(k, v)).count();
            prop_assert_eq!(hits, 1);
        }
    }
}
