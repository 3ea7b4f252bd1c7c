//! Induced Markov systems with class-constant potentials.
//!
//! A model is a list of branch classes `(n, N(n), w(n), ψ̄(n))` enumerated up
//! to a truncation, plus a stand-in for everything beyond it: either an
//! analytic [`TailLaw`], an extrapolation of the last enumerated classes, or
//! nothing (a genuinely finite system). Every functional below sums the
//! enumerated part with compensated summation and adds the remainder.

use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Multiplicity, PotentialFamily, TailLaw};
use crate::numerics::{integrate_to_infinity, NeumaierSum};
use crate::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchClass<T> {
    /// Inducing time.
    pub n: u64,
    pub count: Multiplicity,
    pub log_weight: T,
    #[serde(default)]
    pub psi_bar: T,
}

impl<T: Real> BranchClass<T> {
    pub fn new(n: u64, count: Multiplicity, log_weight: T) -> Self {
        Self { n, count, log_weight, psi_bar: T::zero() }
    }

    /// Single branch of mass `p`.
    pub fn single(n: u64, p: T) -> Self {
        Self::new(n, Multiplicity::one(), p.ln())
    }

    /// `ln(N(n)·e^{w(n)})`.
    pub fn ln_mass(&self) -> T {
        T::lit(self.count.ln()) + self.log_weight
    }
}

/// Class-marginal Gibbs law at `(u, s)`. The enumerated probabilities `q`
/// and the mass `tail_mass` carried beyond the truncation sum to one.
#[derive(Clone, Debug, Serialize)]
pub struct GibbsWeights<T> {
    pub u: T,
    pub s: T,
    pub q: Vec<T>,
    pub tail_mass: T,
    /// `F(u,s) = Σ N(n)e^{w(n)+sψ̄(n)−un}` before normalization.
    pub normalizer: T,
}

/// A moment that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Moment<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Moment<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Moment::Infinite)
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }
}

/// Estimated convergence abscissa in `u` with its uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AbscissaEstimate<T> {
    pub value: T,
    pub tolerance: T,
}

/// Extrapolated remainder `exp(ε + κ·ln(x/anchor) + σx)` fitted to the last
/// enumerated classes.
#[derive(Clone, Copy, Debug)]
struct FittedTail<T> {
    sigma: T,
    tol: T,
    anchor: T,
    eps: T,
    kappa: T,
}

pub struct InducedModel<T: Real> {
    classes: Vec<BranchClass<T>>,
    tail: Option<TailLaw<T>>,
    extrapolate: bool,
    truncation: u64,
    potential: Option<PotentialFamily<T>>,
    ns: Vec<T>,
    lnm: Vec<T>,
    psi: Vec<T>,
    mass: OnceLock<Vec<T>>,
    suffix: OnceLock<Vec<T>>,
    base_mass: OnceLock<Option<T>>,
}

impl<T: Real> Clone for InducedModel<T> {
    fn clone(&self) -> Self {
        Self::assemble(
            self.classes.clone(),
            self.tail.clone(),
            self.extrapolate,
            self.truncation,
            self.potential.clone(),
        )
    }
}

impl<T: Real> std::fmt::Debug for InducedModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InducedModel")
            .field("classes", &self.classes.len())
            .field("truncation", &self.truncation)
            .field("tail", &self.tail)
            .field("extrapolate", &self.extrapolate)
            .field("potential", &self.potential)
            .finish()
    }
}

#[inline]
fn em_midpoint<T: Real, G: Fn(T) -> T>(g: G, a: T) -> Result<T> {
    // Σ_{n > a−½} g(n) ≈ ∫_a^∞ g − g'(a)/24
    let h = T::lit(1e-3) * a;
    let deriv = (g(a + h) - g(a - h)) / (h + h);
    let integral = integrate_to_infinity(&g, a, T::lit(1e-15))?;
    Ok(integral - deriv / T::lit(24.0))
}

impl<T: Real> InducedModel<T> {
    fn assemble(
        classes: Vec<BranchClass<T>>,
        tail: Option<TailLaw<T>>,
        extrapolate: bool,
        truncation: u64,
        potential: Option<PotentialFamily<T>>,
    ) -> Self {
        let ns = classes.iter().map(|c| T::idx(c.n)).collect();
        let lnm = classes.iter().map(|c| c.ln_mass()).collect();
        let psi = classes.iter().map(|c| c.psi_bar).collect();
        Self {
            classes,
            tail,
            extrapolate,
            truncation,
            potential,
            ns,
            lnm,
            psi,
            mass: OnceLock::new(),
            suffix: OnceLock::new(),
            base_mass: OnceLock::new(),
        }
    }

    fn check_classes(classes: &[BranchClass<T>]) -> Result<()> {
        if classes.is_empty() {
            return Err(Error::config("model has no branch classes"));
        }
        let mut prev = 0u64;
        for c in classes {
            if c.n == 0 || c.n <= prev {
                return Err(Error::config(format!(
                    "inducing times must be positive and strictly increasing (got {} after {prev})",
                    c.n
                )));
            }
            if !c.count.is_zero() && !c.log_weight.is_finite() && c.log_weight != T::neg_infinity() {
                return Err(Error::config(format!("non-finite log-weight at n = {}", c.n)));
            }
            if !c.psi_bar.is_finite() {
                return Err(Error::config(format!("non-finite ψ̄ at n = {}", c.n)));
            }
            prev = c.n;
        }
        Ok(())
    }

    /// Model whose classes beyond the last one follow `tail` when given, or
    /// an extrapolation of the enumerated classes otherwise.
    pub fn new(classes: Vec<BranchClass<T>>, tail: Option<TailLaw<T>>) -> Result<Self> {
        Self::check_classes(&classes)?;
        if let Some(t) = &tail {
            t.validate()?;
        }
        let truncation = classes.last().map(|c| c.n).unwrap_or(0);
        let extrapolate = tail.is_none();
        Ok(Self::assemble(classes, tail, extrapolate, truncation, None))
    }

    /// Model with exactly the listed classes and nothing beyond.
    pub fn finite(classes: Vec<BranchClass<T>>) -> Result<Self> {
        Self::check_classes(&classes)?;
        let truncation = classes.last().map(|c| c.n).unwrap_or(0);
        Ok(Self::assemble(classes, None, false, truncation, None))
    }

    /// Single-branch classes `n = 1..=len` with the given masses.
    pub fn from_masses(masses: &[T], tail: Option<TailLaw<T>>) -> Result<Self> {
        let classes = masses
            .iter()
            .enumerate()
            .map(|(i, &p)| BranchClass::single(i as u64 + 1, p))
            .collect();
        Self::new(classes, tail)
    }

    /// Attaches a perturbation: sets `ψ̄(n)` on every class and uses the
    /// family beyond the truncation.
    pub fn with_potential(&self, potential: PotentialFamily<T>) -> Result<Self> {
        potential.validate()?;
        let mut classes = self.classes.clone();
        for c in &mut classes {
            c.psi_bar = potential.eval(T::idx(c.n));
        }
        Ok(Self::assemble(
            classes,
            self.tail.clone(),
            self.extrapolate,
            self.truncation,
            Some(potential),
        ))
    }

    pub fn classes(&self) -> &[BranchClass<T>] {
        &self.classes
    }

    pub fn tail_law(&self) -> Option<&TailLaw<T>> {
        self.tail.as_ref()
    }

    pub fn potential(&self) -> Option<&PotentialFamily<T>> {
        self.potential.as_ref()
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `ln(N(n)e^{w(n)})` per class.
    pub fn ln_masses(&self) -> &[T] {
        &self.lnm
    }

    fn masses(&self) -> &[T] {
        self.mass.get_or_init(|| self.lnm.iter().map(|l| l.exp()).collect())
    }

    #[inline]
    fn exponent(&self, i: usize, u: T, s: T) -> T {
        let l = self.lnm[i];
        if l == T::neg_infinity() {
            return l;
        }
        if s == T::zero() {
            l - u * self.ns[i]
        } else {
            l + s * self.psi[i] - u * self.ns[i]
        }
    }

    fn psi_at(&self, x: T) -> T {
        match &self.potential {
            Some(p) => p.eval(x),
            None => self.psi.last().copied().unwrap_or_else(T::zero),
        }
    }

    /// Index of the last class with inducing time `≤ n` and finite mass.
    fn class_at_or_below(&self, n: T) -> Option<usize> {
        let k = self.ns.partition_point(|&x| x <= n);
        (0..k).rev().find(|&i| self.lnm[i].is_finite())
    }

    fn fitted_tail(&self, s: T) -> Option<FittedTail<T>> {
        if !self.extrapolate {
            return None;
        }
        let ic = self.class_at_or_below(T::idx(self.truncation))?;
        let nc = self.ns[ic];
        if nc < T::lit(32.0) {
            return None;
        }
        let eighth = T::lit(0.125);
        let pick = |f: T| self.class_at_or_below(nc * f);
        let (i8, i4, i2) = (pick(eighth)?, pick(T::lit(0.25))?, pick(T::lit(0.5))?);
        if !(i8 < i4 && i4 < i2 && i2 < ic) {
            return None;
        }
        let e = |i: usize| self.exponent(i, T::zero(), s);
        let slope = |a: usize, b: usize| (e(b) - e(a)) / (self.ns[b] - self.ns[a]);
        let (s1, s2, s3) = (slope(i8, i4), slope(i4, i2), slope(i2, ic));
        let two = T::lit(2.0);
        // the first step removes a ln n prefactor, the second a 1/n term
        let r1 = two * s2 - s1;
        let r2 = two * s3 - s2;
        let sigma = (T::lit(4.0) * r2 - r1) / T::lit(3.0);
        let tol = (r2 - sigma).abs() + T::eps() * T::lit(64.0) * (T::one() + sigma.abs());
        let eps_c = e(ic) - sigma * nc;
        let eps_b = e(i2) - sigma * self.ns[i2];
        let kappa = (eps_c - eps_b) / (nc / self.ns[i2]).ln();
        Some(FittedTail { sigma, tol, anchor: nc, eps: eps_c, kappa })
    }

    /// Convergence abscissa of `u ↦ F(u, s)`.
    pub fn abscissa(&self, s: T) -> AbscissaEstimate<T> {
        if self.tail.is_some() {
            let value = self
                .potential
                .as_ref()
                .map(|p| p.linear_rate(s))
                .unwrap_or_else(T::zero);
            return AbscissaEstimate { value, tolerance: T::zero() };
        }
        match self.fitted_tail(s) {
            Some(ft) => AbscissaEstimate { value: ft.sigma, tolerance: ft.tol },
            None => AbscissaEstimate { value: T::neg_infinity(), tolerance: T::zero() },
        }
    }

    fn divergent(&self, u: T, s: T) -> Error {
        Error::DivergentSeries {
            u: u.as_f64(),
            s: s.as_f64(),
            abscissa: self.abscissa(s).value.as_f64(),
        }
    }

    /// Whether the analytic remainder converges with an extra factor `x^extra`.
    fn law_converges(&self, law: &TailLaw<T>, u: T, s: T, extra: T) -> bool {
        let (lin, damp, pow) = match &self.potential {
            Some(p) => (p.linear_rate(s), p.sublinear_damping(s), p.power_rate(s)),
            None => (T::zero(), T::zero(), T::zero()),
        };
        let delta = u - lin;
        if delta > T::zero() {
            return true;
        }
        if delta < T::zero() {
            return false;
        }
        if damp != T::zero() {
            return damp > T::zero();
        }
        -law.beta - T::one() + pow + extra < -T::one()
    }

    /// `Σ_{n > truncation} g(n)` where the integrand is built from
    /// `ln p(x)` and `a(x) = sψ̄(x) − ux` by `f`.
    fn law_remainder<F: Fn(T, T, T) -> T>(
        &self,
        law: &TailLaw<T>,
        u: T,
        s: T,
        extra: T,
        f: F,
    ) -> Result<T> {
        if !self.law_converges(law, u, s, extra) {
            return Err(self.divergent(u, s));
        }
        let g = |x: T| {
            let a = if s == T::zero() { -u * x } else { s * self.psi_at(x) - u * x };
            f(x, law.ln_mass(x), a)
        };
        let a = T::idx(self.truncation) + T::lit(0.5);
        em_midpoint(g, a).map_err(|e| match e {
            Error::IntegrationFailure { .. } => self.divergent(u, s),
            other => other,
        })
    }

    /// Extrapolated remainder `Σ_{n ≥ start+½} x^extra·e^{e(x) − ux}` with
    /// `e(x) − ux = ε + κ·ln(x/anchor) − (u − σ)x`.
    fn fitted_remainder_from(&self, ft: &FittedTail<T>, u: T, s: T, extra: T, start: T) -> Result<T> {
        let mut delta = u - ft.sigma;
        if delta < -ft.tol {
            return Err(self.divergent(u, s));
        }
        if delta <= ft.tol {
            delta = T::zero();
            if ft.kappa + extra >= -T::one() {
                return Err(self.divergent(u, s));
            }
        }
        let g = |x: T| (ft.eps + ft.kappa * (x / ft.anchor).ln() - delta * x).exp() * x.powf(extra);
        em_midpoint(g, start + T::lit(0.5)).map_err(|e| match e {
            Error::IntegrationFailure { .. } => self.divergent(u, s),
            other => other,
        })
    }

    fn fitted_remainder(&self, ft: &FittedTail<T>, u: T, s: T, extra: T) -> Result<T> {
        self.fitted_remainder_from(ft, u, s, extra, T::idx(self.truncation))
    }

    fn plain_remainder(&self, u: T, s: T, extra: T) -> Result<T> {
        if let Some(law) = &self.tail {
            if u == T::zero() && s == T::zero() && extra == T::zero() {
                return Ok(law.tail(T::idx(self.truncation)));
            }
            return self.law_remainder(law, u, s, extra, |x, lp, a| (lp + a).exp() * x.powf(extra));
        }
        match self.fitted_tail(s) {
            Some(ft) => self.fitted_remainder(&ft, u, s, extra),
            None => Ok(T::zero()),
        }
    }

    /// `F(u, s) = Σ N(n)e^{w(n)+sψ̄(n)−un}` including the remainder.
    pub fn partition(&self, u: T, s: T) -> Result<T> {
        let mut acc = NeumaierSum::new();
        for i in 0..self.lnm.len() {
            acc.add(self.exponent(i, u, s).exp());
        }
        let rem = self.plain_remainder(u, s, T::zero())?;
        Ok(acc.value() + rem)
    }

    /// `F(0, 0)`, or `None` if it diverges.
    pub fn base_mass(&self) -> Option<T> {
        *self.base_mass.get_or_init(|| {
            self.partition(T::zero(), T::zero()).ok().filter(|m| m.is_finite() && *m > T::zero())
        })
    }

    /// `F(u, s) − 1`, evaluated as `(F(0,0) − 1) + Σ m·expm1(sψ̄ − un)` when the
    /// base mass is finite so that small excesses keep full relative accuracy.
    pub fn excess(&self, u: T, s: T) -> Result<T> {
        let Some(m0) = self.base_mass() else {
            return Ok(self.partition(u, s)? - T::one());
        };
        let mass = self.masses();
        let mut acc = NeumaierSum::new();
        for i in 0..mass.len() {
            if mass[i] == T::zero() {
                continue;
            }
            let a = if s == T::zero() {
                -u * self.ns[i]
            } else {
                s * self.psi[i] - u * self.ns[i]
            };
            acc.add(mass[i] * a.exp_m1());
        }
        let rem = if let Some(law) = &self.tail {
            if u == T::zero() && s == T::zero() {
                T::zero()
            } else {
                self.law_remainder(law, u, s, T::zero(), |_, lp, a| lp.exp() * a.exp_m1())?
            }
        } else {
            match (self.fitted_tail(s), self.fitted_tail(T::zero())) {
                (Some(ft), Some(f0)) => {
                    self.fitted_remainder(&ft, u, s, T::zero())?
                        - self.fitted_remainder(&f0, T::zero(), T::zero(), T::zero())?
                }
                _ => T::zero(),
            }
        };
        Ok((m0 - T::one()) + acc.value() + rem)
    }

    /// Rescales weights so that `Σ N(n)e^{w(n)} = 1`.
    pub fn normalize(&self) -> Result<Self> {
        let m = match self.partition(T::zero(), T::zero()) {
            Ok(m) => m,
            Err(Error::DivergentSeries { .. }) => {
                return Err(Error::divergent_model("Σ N(n)e^{w(n)} diverges"))
            }
            Err(e) => return Err(e),
        };
        if !(m.is_finite() && m > T::zero()) {
            return Err(Error::divergent_model(format!("total mass {m}")));
        }
        let lm = m.ln();
        let classes = self
            .classes
            .iter()
            .map(|c| BranchClass { log_weight: c.log_weight - lm, ..c.clone() })
            .collect();
        let tail = self.tail.as_ref().map(|t| t.scaled(m.recip()));
        Ok(Self::assemble(classes, tail, self.extrapolate, self.truncation, self.potential.clone()))
    }

    fn suffix(&self) -> &[T] {
        self.suffix.get_or_init(|| {
            let mass = self.masses();
            let mut out = vec![T::zero(); mass.len() + 1];
            let mut acc = NeumaierSum::new();
            for i in (0..mass.len()).rev() {
                acc.add(mass[i]);
                out[i] = acc.value();
            }
            out
        })
    }

    /// `μ̄(τ > n) = Σ_{m>n} N(m)e^{w(m)}` including the remainder.
    pub fn tail(&self, n: u64) -> T {
        if n >= self.truncation {
            return match (&self.tail, self.fitted_tail(T::zero())) {
                (Some(law), _) => law.tail(T::idx(n)),
                (None, Some(ft)) => self
                    .fitted_remainder_from(&ft, T::zero(), T::zero(), T::zero(), T::idx(n))
                    .unwrap_or_else(|_| T::infinity()),
                (None, None) => T::zero(),
            };
        }
        let rem = self.plain_remainder(T::zero(), T::zero(), T::zero()).unwrap_or_else(|_| T::infinity());
        let k = self.ns.partition_point(|&x| x <= T::idx(n));
        self.suffix()[k] + rem
    }

    /// Smallest and largest `n^β·tail(n)` over `n ∈ [lo, hi]`.
    pub fn tail_band(&self, beta: T, lo: u64, hi: u64) -> (T, T) {
        let mut band = (T::infinity(), T::neg_infinity());
        for n in lo..=hi {
            let v = T::idx(n).powf(beta) * self.tail(n);
            band = (band.0.min(v), band.1.max(v));
        }
        band
    }

    /// Return-time law `q_n(u, s)` for `n = 0..=n_max` (index 0 is zero) and
    /// the probability of `τ > n_max`. Inducing times past the truncation are
    /// filled from the analytic tail law when there is one.
    pub fn return_law(&self, u: T, s: T, n_max: u64) -> Result<(Vec<T>, T)> {
        let f = self.partition(u, s)?;
        let mut q = vec![T::zero(); n_max as usize + 1];
        for i in 0..self.lnm.len() {
            let n = self.classes[i].n;
            if n > n_max {
                break;
            }
            q[n as usize] = self.exponent(i, u, s).exp() / f;
        }
        if let Some(law) = &self.tail {
            for n in self.truncation + 1..=n_max {
                let x = T::idx(n);
                let a = if s == T::zero() { -u * x } else { s * self.psi_at(x) - u * x };
                q[n as usize] = (law.ln_mass(x) + a).exp() / f;
            }
        }
        let mut acc = NeumaierSum::new();
        for v in &q {
            acc.add(*v);
        }
        Ok((q, (T::one() - acc.value()).max(T::zero())))
    }

    pub fn gibbs_weights(&self, u: T, s: T) -> Result<GibbsWeights<T>> {
        let rem = self.plain_remainder(u, s, T::zero())?;
        let exps: Vec<T> = (0..self.lnm.len()).map(|i| self.exponent(i, u, s)).collect();
        let top = exps.iter().copied().fold(T::neg_infinity(), T::max);
        let mut acc = NeumaierSum::new();
        for &e in &exps {
            acc.add(e.exp());
        }
        let f = acc.value() + rem;
        if !f.is_finite() || top > T::lit(700.0).min(T::max_value().ln()) {
            return Err(self.divergent(u, s));
        }
        let q = exps.iter().map(|&e| e.exp() / f).collect();
        Ok(GibbsWeights { u, s, q, tail_mass: rem / f, normalizer: f })
    }

    /// `E_{u,s}(τ) = Σ n·q_n(u, s)`.
    pub fn expected_tau(&self, u: T, s: T) -> Result<Moment<T>> {
        let f = self.partition(u, s)?;
        let mut acc = NeumaierSum::new();
        for i in 0..self.lnm.len() {
            acc.add(self.ns[i] * self.exponent(i, u, s).exp());
        }
        match self.plain_remainder(u, s, T::one()) {
            Ok(rem) => {
                let v = (acc.value() + rem) / f;
                Ok(if v.is_finite() { Moment::Finite(v) } else { Moment::Infinite })
            }
            Err(Error::DivergentSeries { .. }) => Ok(Moment::Infinite),
            Err(e) => Err(e),
        }
    }

    /// Total-variation distance `Σ|q_n(0,s) − q_n(0,0)|`.
    pub fn measure_distance(&self, s: T) -> Result<T> {
        if s == T::zero() {
            return Ok(T::zero());
        }
        let f0 = self.partition(T::zero(), T::zero())?;
        let fs = self.partition(T::zero(), s)?;
        let mass = self.masses();
        let mut acc = NeumaierSum::new();
        for i in 0..mass.len() {
            let qs = self.exponent(i, T::zero(), s).exp() / fs;
            acc.add((qs - mass[i] / f0).abs());
        }
        let rem = if let Some(law) = &self.tail {
            self.law_remainder(law, T::zero(), s, T::zero(), |_, lp, a| {
                lp.exp() * (a.exp() / fs - f0.recip()).abs()
            })?
        } else {
            let rs = self.plain_remainder(T::zero(), s, T::zero())?;
            let r0 = self.plain_remainder(T::zero(), T::zero(), T::zero())?;
            (rs / fs - r0 / f0).abs()
        };
        Ok(acc.value() + rem)
    }

    /// `−Σ q log(q/N) + Σ q(w + sψ̄ − u₀n)` under the Gibbs law at `(u₀, s)`;
    /// vanishes exactly when `F(u₀, s) = 1`.
    pub fn abramov_residual(&self, s: T, u0: T) -> Result<T> {
        let gw = self.gibbs_weights(u0, s)?;
        let mut acc = NeumaierSum::new();
        for (i, c) in self.classes.iter().enumerate() {
            let q = gw.q[i];
            if q == T::zero() {
                continue;
            }
            let ln_n = T::lit(c.count.ln());
            let entropy = -q * (q.ln() - ln_n);
            let energy = q * (c.log_weight + s * self.psi[i] - u0 * self.ns[i]);
            acc.add(entropy);
            acc.add(energy);
        }
        // beyond the truncation the same pointwise identity contributes tail·ln F
        acc.add(gw.tail_mass * gw.normalizer.ln());
        Ok(acc.value())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::numerical(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc<T> {
    classes: Vec<BranchClass<T>>,
    #[serde(default)]
    tail: Option<TailLaw<T>>,
    truncation: u64,
    #[serde(default)]
    extrapolate: bool,
    #[serde(default)]
    potential: Option<PotentialFamily<T>>,
}

impl<T: Real> Serialize for InducedModel<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ModelDoc {
            classes: self.classes.clone(),
            tail: self.tail.clone(),
            truncation: self.truncation,
            extrapolate: self.extrapolate,
            potential: self.potential.clone(),
        }
        .serialize(ser)
    }
}

impl<'de, T: Real> Deserialize<'de> for InducedModel<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = ModelDoc::<T>::deserialize(de)?;
        Self::check_classes(&doc.classes).map_err(serde::de::Error::custom)?;
        if let Some(t) = &doc.tail {
            t.validate().map_err(serde::de::Error::custom)?;
        }
        if let Some(p) = &doc.potential {
            p.validate().map_err(serde::de::Error::custom)?;
        }
        let last = doc.classes.last().map(|c| c.n).unwrap_or(0);
        if doc.truncation < last {
            return Err(serde::de::Error::custom("truncation below the last class"));
        }
        Ok(Self::assemble(doc.classes, doc.tail, doc.extrapolate, doc.truncation, doc.potential))
    }
}
