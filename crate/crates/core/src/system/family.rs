use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An indexed family of vector fields `f_i(x, d)` sharing one output map
/// `y = h(x)`.
///
/// All modes share the state, disturbance and output dimensions. Modes may
/// optionally expose an explicit control signal for logging and energy
/// functionals; `control_dim() == 0` means there is none.
pub trait ModeFamily: Sync {
    fn state_dim(&self) -> usize;
    fn disturbance_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn mode_count(&self) -> usize;

    fn vector_field(&self, mode: usize, x: &[f64], d: &[f64], dx: &mut [f64]);

    fn output(&self, x: &[f64], y: &mut [f64]);

    fn control_dim(&self) -> usize {
        0
    }

    fn control(&self, _mode: usize, _x: &[f64], _u: &mut [f64]) {}

    fn state_names(&self) -> Vec<String> {
        (0..self.state_dim()).map(|i| format!("x{i}")).collect()
    }

    fn output_names(&self) -> Vec<String> {
        (0..self.output_dim()).map(|i| format!("y{i}")).collect()
    }

    fn control_names(&self) -> Vec<String> {
        (0..self.control_dim()).map(|i| format!("u{i}")).collect()
    }

    fn mode_name(&self, mode: usize) -> String {
        mode.to_string()
    }

    /// Euclidean norm of `h(x)`.
    fn output_norm(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.output_dim()];
        self.output(x, &mut y);
        euclidean_norm(&y)
    }
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Linear modes `dx/dt = A_i x + B d`, `y = C x`.
///
/// Matrices are stored row-major as nested vectors so they can be read
/// straight from a JSON experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFamily {
    pub a: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
}

impl LinearFamily {
    pub fn new(a: Vec<Vec<Vec<f64>>>, b: Vec<Vec<f64>>, c: Vec<Vec<f64>>) -> Result<Self> {
        let fam = LinearFamily { a, b, c };
        fam.check()?;
        Ok(fam)
    }

    /// Scalar modes `dx/dt = -rate_i x + d`, `y = x`.
    pub fn scalar(rates: &[f64]) -> Self {
        LinearFamily {
            a: rates.iter().map(|r| vec![vec![-r]]).collect(),
            b: vec![vec![1.0]],
            c: vec![vec![1.0]],
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(Error::InvalidConfig("linear family has no modes".into()));
        }
        let n = self.a[0].len();
        if n == 0 {
            return Err(Error::InvalidConfig("state dimension is zero".into()));
        }
        for (i, a) in self.a.iter().enumerate() {
            if a.len() != n || a.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidConfig(format!("A[{i}] is not {n}x{n}")));
            }
        }
        if self.b.len() != n {
            return Err(Error::InvalidConfig(format!("B must have {n} rows")));
        }
        let m = self.b[0].len();
        if self.b.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidConfig("B rows have unequal length".into()));
        }
        if self.c.is_empty() || self.c.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidConfig(format!("C must have {n} columns")));
        }
        let finite = self
            .a
            .iter()
            .flatten()
            .chain(self.b.iter())
            .chain(self.c.iter())
            .flatten()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("non-finite matrix entry".into()));
        }
        Ok(())
    }
}

impl ModeFamily for LinearFamily {
    fn state_dim(&self) -> usize {
        self.a[0].len()
    }

    fn disturbance_dim(&self) -> usize {
        self.b[0].len()
    }

    fn output_dim(&self) -> usize {
        self.c.len()
    }

    fn mode_count(&self) -> usize {
        self.a.len()
    }

    fn vector_field(&self, mode: usize, x: &[f64], d: &[f64], dx: &mut [f64]) {
        let a = &self.a[mode];
        for (i, out) in dx.iter_mut().enumerate() {
            let ax: f64 = a[i].iter().zip(x).map(|(p, q)| p * q).sum();
            let bd: f64 = self.b[i].iter().zip(d).map(|(p, q)| p * q).sum();
            *out = ax + bd;
        }
    }

    fn output(&self, x: &[f64], y: &mut [f64]) {
        for (row, out) in self.c.iter().zip(y.iter_mut()) {
            *out = row.iter().zip(x).map(|(p, q)| p * q).sum();
        }
    }
}
