//! Class-constant perturbations `ψ̄(n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialFamily<T> {
    /// `ψ̄(n) = κ·log n + constant`.
    Log { kappa: T, constant: T },
    /// `ψ̄(n) = C′ − C·n^γ` with `γ ∈ (0, 1]`, `C > 0`.
    Polynomial { c_prime: T, c: T, gamma: T },
    /// Explicit values `ψ̄(1), ψ̄(2), …`; the last value extends beyond the table.
    Table { values: Vec<T> },
}

impl<T: Real> PotentialFamily<T> {
    pub fn log() -> Self {
        PotentialFamily::Log { kappa: T::one(), constant: T::zero() }
    }

    pub fn polynomial(c_prime: T, c: T, gamma: T) -> Result<Self> {
        let p = PotentialFamily::Polynomial { c_prime, c, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(value: T) -> Self {
        PotentialFamily::Table { values: vec![value] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialFamily::Log { kappa, constant } => {
                if !kappa.is_finite() || !constant.is_finite() {
                    return Err(Error::config("log potential parameters must be finite"));
                }
            }
            PotentialFamily::Polynomial { c_prime, c, gamma } => {
                if !(*gamma > T::zero() && *gamma <= T::one()) {
                    return Err(Error::config(format!("γ = {gamma} outside (0,1]")));
                }
                if !(*c > T::zero()) || !c.is_finite() || !c_prime.is_finite() {
                    return Err(Error::config(format!("polynomial potential needs C > 0, got {c}")));
                }
            }
            PotentialFamily::Table { values } => {
                if values.is_empty() {
                    return Err(Error::config("empty potential table"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::config("potential table has non-finite entries"));
                }
            }
        }
        Ok(())
    }

    /// `ψ̄` at a (possibly non-integer) inducing time `x ≥ 1`.
    pub fn eval(&self, x: T) -> T {
        match self {
            PotentialFamily::Log { kappa, constant } => *kappa * x.ln() + *constant,
            PotentialFamily::Polynomial { c_prime, c, gamma } => *c_prime - *c * x.powf(*gamma),
            PotentialFamily::Table { values } => {
                let i = x.round().to_usize().unwrap_or(usize::MAX).max(1);
                values[(i - 1).min(values.len() - 1)]
            }
        }
    }

    /// Exponential rate `lim s·ψ̄(x)/x`.
    pub fn linear_rate(&self, s: T) -> T {
        match self {
            PotentialFamily::Polynomial { c, gamma, .. } if *gamma == T::one() => -s * *c,
            _ => T::zero(),
        }
    }

    /// Stretched-exponential damping `s·C` when `γ < 1` (zero otherwise).
    pub fn sublinear_damping(&self, s: T) -> T {
        match self {
            PotentialFamily::Polynomial { c, gamma, .. } if *gamma < T::one() => s * *c,
            _ => T::zero(),
        }
    }

    /// Power of `x` contributed by `e^{sψ̄(x)}`.
    pub fn power_rate(&self, s: T) -> T {
        match self {
            PotentialFamily::Log { kappa, .. } => s * *kappa,
            _ => T::zero(),
        }
    }

    /// Upper bound of `ψ̄`, when the family has one.
    pub fn sup(&self) -> Option<T> {
        match self {
            PotentialFamily::Polynomial { c_prime, .. } => Some(*c_prime),
            PotentialFamily::Table { values } => {
                Some(values.iter().copied().fold(T::neg_infinity(), T::max))
            }
            PotentialFamily::Log { .. } => None,
        }
    }
}
