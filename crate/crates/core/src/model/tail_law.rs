//! Analytic return-time tails `μ̄(τ > x) = c·x^{−β} + b(x)` and the constant
//! `c_H` of the eigenvalue expansion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{adaptive_integrate, NeumaierSum};
use crate::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm<T> {
    pub coef: T,
    pub exponent: T,
}

/// Correction `b(x)` on top of the leading `c·x^{−β}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailCorrection<T> {
    #[default]
    None,
    /// Tail `c·(x + shift)^{−β}`.
    Shifted { shift: T },
    /// Tail `c·x^{−β} + Σ coef·x^{−exponent}`.
    Powers { terms: Vec<PowerTerm<T>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailLaw<T> {
    pub beta: T,
    pub c: T,
    #[serde(default)]
    pub correction: TailCorrection<T>,
}

/// Which integer part enters `H₁(x) = c([x]^{−β} − x^{−β}) + b([x])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bracket {
    Ceiling,
    Floor,
}

/// `(1 − 1/y)^{−β} − 1`, accurate for large `y`.
#[inline]
fn shifted_ratio_m1<T: Real>(beta: T, y: T) -> T {
    (-beta * (-y.recip()).ln_1p()).exp_m1()
}

impl<T: Real> TailLaw<T> {
    pub fn new(beta: T, c: T) -> Result<Self> {
        Self::with_correction(beta, c, TailCorrection::None)
    }

    pub fn with_correction(beta: T, c: T, correction: TailCorrection<T>) -> Result<Self> {
        let law = Self { beta, c, correction };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > T::zero() && self.beta < T::one()) {
            return Err(Error::config(format!("tail exponent β = {} outside (0,1)", self.beta)));
        }
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(Error::config(format!("tail constant c = {} must be positive", self.c)));
        }
        Ok(())
    }

    /// `μ̄(τ > x)` for real `x ≥ 1`.
    pub fn tail(&self, x: T) -> T {
        match &self.correction {
            TailCorrection::None => self.c * x.powf(-self.beta),
            TailCorrection::Shifted { shift } => self.c * (x + *shift).powf(-self.beta),
            TailCorrection::Powers { terms } => {
                let mut acc = self.c * x.powf(-self.beta);
                for t in terms {
                    acc = acc + t.coef * x.powf(-t.exponent);
                }
                acc
            }
        }
    }

    /// `ln(tail(x − 1) − tail(x))`, the log class mass at real `x > 1`.
    pub fn ln_mass(&self, x: T) -> T {
        match &self.correction {
            TailCorrection::None => {
                self.c.ln() - self.beta * x.ln() + shifted_ratio_m1(self.beta, x).ln()
            }
            TailCorrection::Shifted { shift } => {
                let y = x + *shift;
                self.c.ln() - self.beta * y.ln() + shifted_ratio_m1(self.beta, y).ln()
            }
            TailCorrection::Powers { terms } => {
                let mut acc = self.c * x.powf(-self.beta) * shifted_ratio_m1(self.beta, x);
                for t in terms {
                    acc = acc + t.coef * x.powf(-t.exponent) * shifted_ratio_m1(t.exponent, x);
                }
                acc.ln()
            }
        }
    }

    /// `b(k) = tail(k) − c·k^{−β}`.
    pub fn correction_at(&self, k: T) -> T {
        match &self.correction {
            TailCorrection::None => T::zero(),
            TailCorrection::Shifted { shift } => {
                // c·k^{−β}((1 + h/k)^{−β} − 1)
                self.c * k.powf(-self.beta) * (-self.beta * (*shift / k).ln_1p()).exp_m1()
            }
            TailCorrection::Powers { terms } => terms
                .iter()
                .map(|t| t.coef * k.powf(-t.exponent))
                .fold(T::zero(), |a, b| a + b),
        }
    }

    /// Multiplies the whole law by `factor` (used by normalization).
    pub fn scaled(&self, factor: T) -> Self {
        let correction = match &self.correction {
            TailCorrection::Powers { terms } => TailCorrection::Powers {
                terms: terms
                    .iter()
                    .map(|t| PowerTerm { coef: t.coef * factor, exponent: t.exponent })
                    .collect(),
            },
            other => other.clone(),
        };
        Self { beta: self.beta, c: self.c * factor, correction }
    }

    /// Sum `Σ_{k≥1} b(k)` with an Euler-Maclaurin tail beyond `K`.
    fn correction_sum(&self) -> Result<T> {
        const K: u64 = 20_000;
        match &self.correction {
            TailCorrection::None => Ok(T::zero()),
            TailCorrection::Shifted { shift } => {
                let mut acc = NeumaierSum::new();
                for k in 1..=K {
                    acc.add(self.correction_at(T::idx(k)));
                }
                // ∫_{K+½}^∞ c((x+h)^{−β} − x^{−β}) dx
                let a = T::idx(K) + T::lit(0.5);
                let one_m = T::one() - self.beta;
                let integral = self.c * (a.powf(one_m) - (a + *shift).powf(one_m)) / one_m;
                let deriv = self.correction_at(a + T::lit(0.5)) - self.correction_at(a - T::lit(0.5));
                acc.add(integral - deriv / T::lit(24.0));
                Ok(acc.value())
            }
            TailCorrection::Powers { terms } => {
                let mut acc = NeumaierSum::new();
                for t in terms {
                    if t.exponent <= T::one() {
                        return Err(Error::integration(format!(
                            "correction term x^-{} is not summable",
                            t.exponent
                        )));
                    }
                    let mut part = NeumaierSum::new();
                    for k in 1..=K {
                        part.add(T::idx(k).powf(-t.exponent));
                    }
                    let a = T::idx(K) + T::lit(0.5);
                    let e = t.exponent;
                    part.add(a.powf(T::one() - e) / (e - T::one()) + e * a.powf(-e - T::one()) / T::lit(24.0));
                    acc.add(t.coef * part.value());
                }
                Ok(acc.value())
            }
        }
    }
}

/// `c_H = ∫₀^∞ H₁(x) dx` with the ceiling bracket.
pub fn ch_constant<T: Real>(tail: &TailLaw<T>) -> Result<T> {
    ch_constant_with(tail, Bracket::Ceiling)
}

/// `c_H` with an explicit bracket. Under the floor bracket the interval `[0,1)`
/// uses `0^{−β} = 0` and `b(0) = 1` (the tail at 0 of a probability law), so
/// the floor value exceeds the ceiling value by exactly 1.
pub fn ch_constant_with<T: Real>(tail: &TailLaw<T>, bracket: Bracket) -> Result<T> {
    if !(tail.beta > T::zero() && tail.beta < T::one()) {
        return Err(Error::config(format!("tail exponent β = {} outside (0,1)", tail.beta)));
    }
    if tail.c < T::zero() || !tail.c.is_finite() {
        return Err(Error::config(format!("tail constant c = {} must be nonnegative", tail.c)));
    }
    let beta = tail.beta;
    let c = tail.c;
    let one_m = T::one() - beta;
    // [0,1): ∫ c(1 − x^{−β}) dx with x = y^{1/(1−β)} removing the singularity
    let p = one_m.recip();
    let tol = T::lit(1e-13).max(T::eps() * T::lit(100.0));
    let first = adaptive_integrate(
        |y: T| c * p * (y.powf(p - T::one()) - T::one()),
        T::zero(),
        T::one(),
        tol,
    )?;
    // (k−1, k] for k ≥ 2: c(k^{−β} − ∫_{k−1}^k x^{−β} dx)
    const K: u64 = 20_000;
    let mut acc = NeumaierSum::new();
    acc.add(first);
    for k in 2..=K {
        let kf = T::idx(k);
        // ∫_{k−1}^k x^{−β} dx = k^{1−β}(1 − (1 − 1/k)^{1−β})/(1−β)
        let integral = -kf.powf(one_m) * (one_m * (-kf.recip()).ln_1p()).exp_m1() / one_m;
        acc.add(c * (kf.powf(-beta) - integral));
    }
    // g(k) = −c Σ_{j≥1} (β)_j/(j+1)! k^{−β−j}; sum over k > K by Euler-Maclaurin
    let mut rising = T::one();
    let mut fact = T::one();
    for j in 1..=4u64 {
        let jf = T::idx(j);
        rising = rising * (beta + jf - T::one());
        fact = fact * (jf + T::one());
        let sigma = beta + jf;
        let kf = T::idx(K);
        let tail_sum = kf.powf(T::one() - sigma) / (sigma - T::one()) - kf.powf(-sigma) / T::lit(2.0)
            + sigma * kf.powf(-sigma - T::one()) / T::lit(12.0);
        acc.add(-c * rising / fact * tail_sum);
    }
    acc.add(tail.correction_sum()?);
    let ceiling = acc.value();
    if !ceiling.is_finite() {
        return Err(Error::integration("c_H is not finite"));
    }
    Ok(match bracket {
        Bracket::Ceiling => ceiling,
        Bracket::Floor => ceiling + T::one(),
    })
}
