use crate::error::{Error, Result};

/// Bisect a bracket with `pred(lo) == false` and `pred(hi) == true` down to
/// width `tol`; returns the final `hi`, a point where the predicate holds.
pub fn bisect_predicate<P>(mut pred: P, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    P: FnMut(f64) -> Result<bool>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Root of `g` on `[t_lo, t_hi]` to within `tol`, by bisection.
pub fn locate_crossing<G>(mut g: G, t_lo: f64, t_hi: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    let (g_lo, g_hi) = (g(t_lo), g(t_hi));
    if g_lo == 0.0 {
        return Ok(t_lo);
    }
    if g_hi == 0.0 {
        return Ok(t_hi);
    }
    if !(g_lo.signum() != g_hi.signum()) || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::NoCrossing { lo: t_lo, hi: t_hi });
    }
    let lo_sign = g_lo.signum();
    bisect_predicate(|t| Ok(g(t).signum() != lo_sign), t_lo, t_hi, tol)
}
