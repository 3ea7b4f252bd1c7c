//! Least-squares fits used by every asymptotic check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// Result of a log-log regression `y ≈ constant · x^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport<T> {
    pub exponent: T,
    pub constant: T,
    pub stderr_exponent: T,
    pub stderr_constant: T,
    pub r2: T,
    pub window: [T; 2],
    pub n_points: usize,
}

/// Ordinary least squares `y = intercept + slope·x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub stderr_slope: T,
    pub stderr_intercept: T,
    pub r2: T,
}

pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::config("linear fit needs at least two paired points"));
    }
    let nf = T::idx(n as u64);
    let mx = xs.iter().copied().sum::<T>() / nf;
    let my = ys.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() {
        return Err(Error::config("degenerate abscissae in linear fit"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum::<T>();
    let r2 = if syy > T::zero() { T::one() - rss / syy } else { T::one() };
    let (se_slope, se_icpt) = if n > 2 {
        let sigma2 = rss / T::idx(n as u64 - 2);
        let se_s = (sigma2 / sxx).sqrt();
        let se_i = (sigma2 * (T::one() / nf + mx * mx / sxx)).sqrt();
        (se_s, se_i)
    } else {
        (T::zero(), T::zero())
    };
    Ok(LinearFit { slope, intercept, stderr_slope: se_slope, stderr_intercept: se_icpt, r2 })
}

fn check_window<T: Real>(xs: &[T]) -> Result<[T; 2]> {
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if !(lo > T::zero()) {
        return Err(Error::config("fit abscissae must be positive"));
    }
    if hi < T::lit(10.0) * lo * (T::one() - T::lit(1e-9)) {
        return Err(Error::config(format!(
            "fit window [{lo}, {hi}] spans less than one decade"
        )));
    }
    Ok([lo, hi])
}

/// Fits `|y| ≈ constant · x^exponent` by regression of `log|y|` on `log x`.
/// Refuses windows narrower than one decade and nonpositive abscissae.
pub fn power_law_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<FitReport<T>> {
    let window = check_window(xs)?;
    if ys.iter().any(|y| *y == T::zero() || !y.is_finite()) {
        return Err(Error::numerical("power-law fit needs finite nonzero ordinates"));
    }
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.abs().ln()).collect();
    let lf = linear_fit(&lx, &ly)?;
    let constant = lf.intercept.exp();
    Ok(FitReport {
        exponent: lf.slope,
        constant,
        stderr_exponent: lf.stderr_slope,
        stderr_constant: constant * lf.stderr_intercept,
        r2: lf.r2,
        window,
        n_points: xs.len(),
    })
}

/// Result of fitting `y ≈ A·x^b + B·x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoTermFit<T> {
    pub exponent: T,
    pub constant: T,
    pub linear: T,
    pub stderr_exponent: T,
    pub max_rel_residual: T,
    pub window: [T; 2],
    pub n_points: usize,
}

/// Relative least squares for fixed `b`; returns `(A, B, rss)`.
fn two_term_at<T: Real>(xs: &[T], ys: &[T], b: T) -> (T, T, T) {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let f1 = x.powf(b) / y;
        let f2 = x / y;
        s11 = s11 + f1 * f1;
        s12 = s12 + f1 * f2;
        s22 = s22 + f2 * f2;
        r1 = r1 + f1;
        r2 = r2 + f2;
    }
    let det = s11 * s22 - s12 * s12;
    let a = (r1 * s22 - r2 * s12) / det;
    let c = (s11 * r2 - s12 * r1) / det;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = (a * x.powf(b) + c * x) / y - T::one();
            r * r
        })
        .sum::<T>();
    (a, c, rss)
}

/// Variable-projection fit of `y ≈ A·x^b + B·x` with `b ∈ (0, 1)`, minimising
/// the relative residual by golden-section search over `b`.
pub fn two_term_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<TwoTermFit<T>> {
    let window = check_window(xs)?;
    if xs.len() < 4 || xs.len() != ys.len() {
        return Err(Error::config("two-term fit needs at least four paired points"));
    }
    let gr = T::lit(0.618_033_988_749_894_9);
    let (mut a, mut b) = (T::lit(1e-3), T::lit(0.999));
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = two_term_at(xs, ys, c).2;
    let mut fd = two_term_at(xs, ys, d).2;
    for _ in 0..200 {
        if (b - a).abs() < T::lit(1e-13) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = two_term_at(xs, ys, c).2;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = two_term_at(xs, ys, d).2;
        }
    }
    let exponent = (a + b) * T::lit(0.5);
    let (constant, linear, rss) = two_term_at(xs, ys, exponent);
    // curvature of the profile residual for a standard error estimate
    let h = T::lit(1e-4);
    let rp = two_term_at(xs, ys, exponent + h).2;
    let rm = two_term_at(xs, ys, exponent - h).2;
    let curv = (rp - T::lit(2.0) * rss + rm) / (h * h);
    let dof = T::idx(xs.len() as u64 - 3);
    let stderr_exponent = if curv > T::zero() {
        (T::lit(2.0) * rss / dof / curv).sqrt()
    } else {
        T::zero()
    };
    let max_rel_residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| ((constant * x.powf(exponent) + linear * x) / y - T::one()).abs())
        .fold(T::zero(), T::max);
    Ok(TwoTermFit {
        exponent,
        constant,
        linear,
        stderr_exponent,
        max_rel_residual,
        window,
        n_points: xs.len(),
    })
}
