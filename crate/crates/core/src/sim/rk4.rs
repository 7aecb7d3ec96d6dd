use crate::error::{Error, Result};

/// Classical RK4 with reusable stage buffers.
#[derive(Clone, Debug)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Rk4 {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    /// Advance `x` by `h` into `out`. Fails with [`Error::Divergence`]
    /// carrying `t` if any stage produces a non-finite value.
    pub fn step<F>(&mut self, f: &mut F, t: f64, x: &[f64], h: f64, out: &mut [f64]) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = x.len();
        debug_assert!(self.k1.len() == n && out.len() == n);
        let diverged = || Error::Divergence { t };

        f(t, x, &mut self.k1);
        if !all_finite(&self.k1) {
            return Err(diverged());
        }
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k2);
        if !all_finite(&self.k2) {
            return Err(diverged());
        }
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k3);
        if !all_finite(&self.k3) {
            return Err(diverged());
        }
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        f(t + h, &self.tmp, &mut self.k4);
        if !all_finite(&self.k4) {
            return Err(diverged());
        }
        for i in 0..n {
            out[i] = x[i] + h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        if !all_finite(out) {
            return Err(diverged());
        }
        Ok(())
    }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// One RK4 step of `dx/dt = f(t, x)`.
pub fn rk4_step<F>(mut f: F, t: f64, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let mut out = vec![0.0; x.len()];
    Rk4::new(x.len()).step(&mut f, t, x, h, &mut out)?;
    Ok(out)
}
