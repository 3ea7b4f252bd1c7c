//! Gauss-Legendre quadrature on finite intervals and on `[a, ∞)` by
//! geometric segmentation.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::sum::NeumaierSum;
use crate::Real;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z = z1 - p1 / dp;
                if (z - z1).abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<T: Real, F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T) -> T {
        let half = T::lit(0.5);
        let mid = (a + b) * half;
        let rad = (b - a) * half;
        let mut acc = NeumaierSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(T::lit(w) * f(mid + rad * T::lit(x)));
        }
        acc.value() * rad
    }
}

/// Shared 32-point rule.
pub fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

fn gauss_legendre_small() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(12))
}

/// Adaptive bisection with a 12-point rule checked against its two halves.
pub fn adaptive_integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> Result<T> {
    let rule = gauss_legendre_small();
    let whole = rule.integrate(&mut f, a, b);
    let mut acc = NeumaierSum::new();
    let mut stack = vec![(a, b, whole, tol, 0u32)];
    while let Some((lo, hi, est, tol, depth)) = stack.pop() {
        let mid = (lo + hi) * T::lit(0.5);
        let left = rule.integrate(&mut f, lo, mid);
        let right = rule.integrate(&mut f, mid, hi);
        let refined = left + right;
        if (refined - est).abs() <= tol || depth >= 60 {
            if depth >= 60 && (refined - est).abs() > tol {
                return Err(Error::integration(format!(
                    "adaptive quadrature did not converge on [{lo}, {hi}]"
                )));
            }
            acc.add(refined);
        } else {
            let half_tol = tol * T::lit(0.5);
            stack.push((lo, mid, left, half_tol, depth + 1));
            stack.push((mid, hi, right, half_tol, depth + 1));
        }
    }
    Ok(acc.value())
}

/// `∫_a^∞ f(x) dx` for `a > 0`, summing the 32-point rule over the segments
/// `[a·2^j, a·2^{j+1}]` until three consecutive segments are negligible
/// relative to the running total.
pub fn integrate_to_infinity<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, rel_tol: T) -> Result<T> {
    if !(a > T::zero()) {
        return Err(Error::integration("lower limit must be positive"));
    }
    let rule = gauss_legendre();
    let mut acc = NeumaierSum::new();
    let mut lo = a;
    let mut quiet = 0;
    let mut growing = 0;
    let mut prev = T::infinity();
    let two = T::lit(2.0);
    let limit = T::max_value() / T::lit(16.0);
    loop {
        let hi = lo * two;
        let seg = rule.integrate(&mut f, lo, hi);
        if !seg.is_finite() {
            return Err(Error::integration(format!("non-finite integrand near x = {lo}")));
        }
        acc.add(seg);
        let total = acc.value().abs();
        if seg.abs() <= rel_tol * total || seg == T::zero() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(acc.value());
            }
        } else {
            quiet = 0;
        }
        if seg.abs() >= prev.abs() * T::lit(0.999) && seg != T::zero() {
            growing += 1;
        } else {
            growing = 0;
        }
        if growing >= 40 {
            return Err(Error::integration("integrand does not decay"));
        }
        prev = seg;
        lo = hi;
        if lo > limit {
            return Err(Error::integration("integral not converged before overflow"));
        }
    }
}
