//! Small dense Lyapunov solves and the Lur'e observer SIIOS estimate.

use nalgebra::DMatrix;

use crate::bounds::kl::{GainFn, KLExp};
use crate::error::{Error, Result};

/// Largest real part over the spectrum of `m`.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_hurwitz(m: &DMatrix<f64>) -> bool {
    spectral_abscissa(m) < 0.0
}

/// Solve `(G + α/2·I)ᵀ P + P (G + α/2·I) = −I` for `n <= 4` through the
/// `n²`-dimensional Kronecker system. The result satisfies
/// `GᵀP + PG <= −αP`.
pub fn solve_lyapunov_small(g: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if n == 0 || n != g.ncols() || n > 4 {
        return Err(Error::InvalidConfig(format!(
            "expected a square matrix of size 1..=4, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha must be >= 0, got {alpha}")));
    }
    let abscissa = spectral_abscissa(g);
    if !(abscissa < -0.5 * alpha) {
        return Err(Error::Infeasible(format!(
            "spectral abscissa {abscissa} is not below -alpha/2 = {}",
            -0.5 * alpha
        )));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let gs_t = (g + &id * (0.5 * alpha)).transpose();
    // column-major vec: vec(AᵀP) = (I ⊗ Aᵀ) vec P,  vec(PA) = (Aᵀ ⊗ I) vec P
    let k = id.kronecker(&gs_t) + gs_t.kronecker(&id);
    let rhs = DMatrix::from_iterator(n * n, 1, (&id * -1.0).iter().copied());
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Infeasible("Lyapunov system is singular".into()))?;
    let p = DMatrix::from_column_slice(n, n, sol.as_slice());
    let p = (&p + p.transpose()) * 0.5;
    if p.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(p)
}

/// Largest eigenvalue of `GᵀP + PG + αP`; non-positive certifies the
/// decay-rate inequality.
pub fn lyapunov_residual(g: &DMatrix<f64>, p: &DMatrix<f64>, alpha: f64) -> f64 {
    let m = g.transpose() * p + p * g + p * alpha;
    let m = (&m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues().max()
}

fn max_singular_value(m: &DMatrix<f64>) -> f64 {
    m.singular_values().max()
}

/// Exponential SIIOS estimate for a Lur'e observer error with Lyapunov
/// matrix `P`, decay `α` and disturbance input `B`:
/// `a = √(2·λmax/λmin)`, `b = α/4`, `c = 2ρ·θmax(B)` with
/// `ρ = θmax(P) / (√α·λmin)`.
pub fn lure_siios_estimate(p: &DMatrix<f64>, alpha: f64, b: &DMatrix<f64>) -> Result<(KLExp, GainFn)> {
    if p.nrows() != p.ncols() || p.nrows() == 0 {
        return Err(Error::InvalidConfig("P must be square".into()));
    }
    if b.nrows() != p.nrows() {
        return Err(Error::InvalidConfig("B must have as many rows as P".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha must be > 0, got {alpha}")));
    }
    let asym = (p - p.transpose()).abs().max();
    if asym > 1e-9 * p.abs().max().max(1.0) {
        return Err(Error::NotPositiveDefinite);
    }
    if p.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let eig = p.symmetric_eigenvalues();
    let (lmin, lmax) = (eig.min(), eig.max());
    let rho = max_singular_value(p) / (alpha.sqrt() * lmin);
    let beta = KLExp::new((2.0 * lmax / lmin).sqrt(), 0.25 * alpha)?;
    let gamma = GainFn::new(2.0 * rho * max_singular_value(b))?;
    Ok((beta, gamma))
}
