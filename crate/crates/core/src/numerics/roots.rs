//! Bracketed root finding: bisection to a relative width, then an Illinois
//! (modified regula falsi) polish.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Real;

#[derive(Clone, Debug, Serialize)]
pub struct RootOutcome<T> {
    pub root: T,
    pub residual: T,
    pub bracket: (T, T),
    pub evaluations: usize,
}

/// Finds a sign change of `f` inside `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must have opposite signs; `+∞`/`−∞` are accepted as
/// signed values (useful when the function diverges at one end). Bisection is
/// geometric while the bracket spans more than a factor 4 with `lo > 0`.
/// Stops when `|f| < ftol` after the bracket is narrower than `rel_width`
/// relative to its upper end, or when the bracket collapses.
pub fn bisect_secant<T: Real, F: FnMut(T) -> Result<T>>(
    mut f: F,
    mut lo: T,
    mut hi: T,
    rel_width: T,
    ftol: T,
) -> Result<RootOutcome<T>> {
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    let mut evals = 2;
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::numerical("NaN at bracket end"));
    }
    if flo == T::zero() {
        return Ok(RootOutcome { root: lo, residual: flo, bracket: (lo, lo), evaluations: evals });
    }
    if fhi == T::zero() {
        return Ok(RootOutcome { root: hi, residual: fhi, bracket: (hi, hi), evaluations: evals });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::numerical(format!(
            "root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    let four = T::lit(4.0);
    let half = T::lit(0.5);
    // bisection phase
    for _ in 0..4000 {
        if hi - lo <= rel_width * hi.abs().max(lo.abs()) && flo.is_finite() && fhi.is_finite() {
            break;
        }
        let mid = if lo > T::zero() && hi > four * lo {
            (lo * hi).sqrt()
        } else {
            lo + (hi - lo) * half
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        evals += 1;
        if fm.is_nan() {
            return Err(Error::numerical(format!("NaN at {mid}")));
        }
        if fm == T::zero() {
            return Ok(RootOutcome { root: mid, residual: fm, bracket: (mid, mid), evaluations: evals });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // Illinois polish
    let mut side = 0i8;
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..200 {
        if best.1.abs() < ftol {
            break;
        }
        if !(flo.is_finite() && fhi.is_finite()) {
            break;
        }
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x > lo && x < hi { x } else { lo + (hi - lo) * half };
        if x <= lo || x >= hi {
            break;
        }
        let fx = f(x)?;
        evals += 1;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == T::zero() {
            break;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi = fhi * half;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo = flo * half;
            }
            side = 1;
        }
    }
    Ok(RootOutcome { root: best.0, residual: best.1, bracket: (lo, hi), evaluations: evals })
}
