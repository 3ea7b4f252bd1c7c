//! Renewal sequences, class-constant correlations and last-visit statistics.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::IntervalMapDescriptor;
use crate::model::InducedModel;
use crate::numerics::{kolmogorov_survival, reg_inc_beta, NeumaierSum};
use crate::pressure::{solve_u0, SolveKind};
use crate::Real;

/// `u_0 = 1`, `u_n = Σ_{j=1}^n q_j u_{n−j}`.
#[derive(Clone, Debug, Serialize)]
pub struct RenewalSequence<T> {
    /// Return-time law, `q[0] = 0`.
    pub q: Vec<T>,
    pub u: Vec<T>,
    /// Mass of the law beyond `n_max`; it cannot affect `u_0..u_{n_max}`.
    pub tail_mass: T,
}

impl<T: Real> RenewalSequence<T> {
    pub fn n_max(&self) -> usize {
        self.u.len() - 1
    }

    /// Largest `|u_n − Σ q_j u_{n−j}|` over all `n ≥ 1`, recomputed from
    /// scratch.
    pub fn recursion_defect(&self) -> T {
        let mut worst = T::zero();
        for n in 1..self.u.len() {
            let mut acc = NeumaierSum::new();
            for j in 1..=n.min(self.q.len() - 1) {
                acc.add(self.q[j] * self.u[n - j]);
            }
            worst = worst.max((acc.value() - self.u[n]).abs());
        }
        worst
    }
}

fn check_law<T: Real>(q: &[T]) -> Result<()> {
    if q.is_empty() {
        return Err(Error::config("empty return-time law"));
    }
    if q[0] != T::zero() {
        return Err(Error::config("return times are positive: q[0] must be 0"));
    }
    if q.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::config("return-time law has negative or non-finite entries"));
    }
    let total: T = q.iter().copied().sum();
    if total > T::one() + T::lit(1e-9) {
        return Err(Error::config(format!("return-time law has total mass {total} > 1")));
    }
    Ok(())
}

/// Direct `O(n²)` convolution.
pub fn renewal_sequence<T: Real>(q: &[T], n_max: usize) -> Result<RenewalSequence<T>> {
    check_law(q)?;
    let mut u = vec![T::zero(); n_max + 1];
    u[0] = T::one();
    for n in 1..=n_max {
        let top = n.min(q.len() - 1);
        let mut acc = T::zero();
        for j in 1..=top {
            acc = acc + q[j] * u[n - j];
        }
        u[n] = acc;
    }
    let kept: T = q.iter().take(n_max + 1).copied().sum();
    Ok(RenewalSequence {
        q: q[..q.len().min(n_max + 1)].to_vec(),
        u,
        tail_mass: (T::one() - kept).max(T::zero()),
    })
}

fn fft_mul<T: Real + FftNum>(planner: &mut FftPlanner<T>, a: &[T], b: &[T], len: usize) -> Vec<T> {
    let size = (a.len() + b.len()).next_power_of_two();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let load = |x: &[T]| {
        let mut v = vec![Complex::new(T::zero(), T::zero()); size];
        for (slot, &val) in v.iter_mut().zip(x) {
            slot.re = val;
        }
        v
    };
    let (mut fa, mut fb) = (load(a), load(b));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * *y;
    }
    inv.process(&mut fa);
    let scale = T::idx(size as u64).recip();
    fa.iter().take(len).map(|c| c.re * scale).collect()
}

/// Transform-based path: `Σ u_n zⁿ = 1/(1 − Σ q_n zⁿ)` by Newton iteration on
/// power series, `O(n log n)`.
pub fn renewal_sequence_fft<T: Real + FftNum>(q: &[T], n_max: usize) -> Result<RenewalSequence<T>> {
    check_law(q)?;
    let len = n_max + 1;
    let mut a = vec![T::zero(); len];
    a[0] = T::one();
    for j in 1..len.min(q.len()) {
        a[j] = -q[j];
    }
    let mut planner = FftPlanner::new();
    let mut g = vec![T::one()];
    let mut k = 1;
    while k < len {
        let k2 = (2 * k).min(len);
        // g ← g(2 − a·g) mod z^{k2}
        let ag = fft_mul(&mut planner, &a[..k2], &g, k2);
        let mut corr = vec![T::zero(); k2];
        for (i, v) in ag.iter().enumerate() {
            corr[i] = -*v;
        }
        corr[0] = corr[0] + T::lit(2.0);
        g = fft_mul(&mut planner, &g, &corr, k2);
        k = k2;
    }
    g.truncate(len);
    let kept: T = q.iter().take(len).copied().sum();
    Ok(RenewalSequence {
        q: q[..q.len().min(len)].to_vec(),
        u: g,
        tail_mass: (T::one() - kept).max(T::zero()),
    })
}

/// Exact rational renewal sequence.
pub fn renewal_exact(q: &[BigRational], n_max: usize) -> Result<Vec<BigRational>> {
    if q.is_empty() || !q[0].is_zero() {
        return Err(Error::config("return times are positive: q[0] must be 0"));
    }
    let mut u = vec![BigRational::zero(); n_max + 1];
    u[0] = BigRational::one();
    for n in 1..=n_max {
        let mut acc = BigRational::zero();
        for j in 1..=n.min(q.len() - 1) {
            acc += &q[j] * &u[n - j];
        }
        u[n] = acc;
    }
    Ok(u)
}

/// Renewal sequence of the Gibbs law at `(u, s)`; the FFT path is used above
/// a few thousand terms.
pub fn model_renewal(model: &InducedModel<f64>, u: f64, s: f64, n_max: usize) -> Result<RenewalSequence<f64>> {
    let (q, _) = model.return_law(u, s, n_max as u64)?;
    if n_max > 4096 {
        renewal_sequence_fft(&q, n_max)
    } else {
        renewal_sequence(&q, n_max)
    }
}

/// `∫_Y v·(w∘fⁿ) dμ̄_s` for class-constant `v, w` (indexed by inducing time,
/// missing entries read as 0) through the Markov-renewal decomposition
/// `E[w]·Σ_{j≤n} E[v; τ=j]·u_{n−j}(s)` under the Gibbs law at `(u₀(s), s)`.
pub fn correlation(model: &InducedModel<f64>, s: f64, n: usize, v: &[f64], w: &[f64]) -> Result<f64> {
    let sol = solve_u0(model, s)?;
    if sol.kind != SolveKind::Root {
        return Err(Error::numerical(format!("s = {s} is transient: no Gibbs law at the pressure")));
    }
    let (q, tail) = model.return_law(sol.u0, s, n as u64)?;
    let seq = if n > 4096 { renewal_sequence_fft(&q, n)? } else { renewal_sequence(&q, n)? };
    let at = |x: &[f64], k: usize| x.get(k).copied().unwrap_or(0.0);
    let mut ew = NeumaierSum::new();
    for (k, &qk) in q.iter().enumerate() {
        ew.add(qk * at(w, k));
    }
    // classes beyond n carry the value of the last entry
    ew.add(tail * w.last().copied().unwrap_or(0.0));
    if n == 0 {
        let mut acc = NeumaierSum::new();
        for (k, &qk) in q.iter().enumerate() {
            acc.add(qk * at(v, k) * at(w, k));
        }
        return Ok(acc.value() + tail * v.last().copied().unwrap_or(0.0) * w.last().copied().unwrap_or(0.0));
    }
    let mut acc = NeumaierSum::new();
    for j in 1..=n {
        acc.add(at(v, j) * q[j] * seq.u[n - j]);
    }
    Ok(ew.value() * acc.value())
}

/// `P(ζ_β ≤ t) = (sin βπ/π) ∫₀^t x^{β−1}(1−x)^{−β} dx = I_t(β, 1−β)`.
pub fn arcsine_cdf<T: Real>(beta: T, t: T) -> Result<T> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(Error::config(format!("β = {beta} outside (0,1)")));
    }
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::config(format!("t = {t} outside [0,1]")));
    }
    Ok(reg_inc_beta(beta, T::one() - beta, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    /// I.i.d. return times drawn from the model's law.
    Skeleton,
    /// Float iteration of an interval map from a uniform point of `Y`.
    Orbit,
}

#[derive(Clone, Debug, Serialize)]
pub struct LastVisitSample {
    pub n: u64,
    /// `Z_n/n` per trial, in trial order.
    pub values: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub mode: SimulationMode,
    /// Orbit mode only: total endpoint perturbations.
    pub perturbations: u64,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Cumulative sampler over `q_1..q_n` with everything else lumped into
/// "τ > n".
struct ReturnSampler {
    cdf: Vec<f64>,
}

impl ReturnSampler {
    fn new(q: &[f64]) -> Self {
        let mut cdf = Vec::with_capacity(q.len());
        let mut acc = NeumaierSum::new();
        for &v in q {
            acc.add(v);
            cdf.push(acc.value());
        }
        Self { cdf }
    }

    /// A return time, or `None` for a time beyond the table.
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        let x: f64 = rng.gen();
        let k = self.cdf.partition_point(|&c| c <= x);
        (k < self.cdf.len()).then_some(k)
    }
}

/// Empirical law of `Z_n/n`, the normalised last visit to `Y` before `n`.
/// Skeleton mode samples return blocks from the Gibbs law at `(0, 0)`; orbit
/// mode needs a map descriptor. Trials are independent ChaCha streams keyed
/// by `(seed, trial)`.
pub fn simulate_last_visit(
    model: &InducedModel<f64>,
    map: Option<&IntervalMapDescriptor<f64>>,
    n: u64,
    trials: usize,
    seed: u64,
    mode: SimulationMode,
) -> Result<LastVisitSample> {
    simulate_last_visit_at(model, map, 0.0, 0.0, n, trials, seed, mode)
}

/// [`simulate_last_visit`] under the Gibbs law at `(u, s)`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_last_visit_at(
    model: &InducedModel<f64>,
    map: Option<&IntervalMapDescriptor<f64>>,
    u: f64,
    s: f64,
    n: u64,
    trials: usize,
    seed: u64,
    mode: SimulationMode,
) -> Result<LastVisitSample> {
    if trials < 1000 {
        return Err(Error::config(format!("trials = {trials} below 1000")));
    }
    if n == 0 {
        return Err(Error::config("horizon must be positive"));
    }
    let nf = n as f64;
    match mode {
        SimulationMode::Skeleton => {
            let (q, _) = model.return_law(u, s, n)?;
            let sampler = ReturnSampler::new(&q);
            let values = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(seed, trial);
                    let mut t = 0u64;
                    loop {
                        match sampler.draw(&mut rng) {
                            Some(k) if t + k as u64 <= n => t += k as u64,
                            _ => break,
                        }
                    }
                    t as f64 / nf
                })
                .collect();
            Ok(LastVisitSample { n, values, seed, trials, mode, perturbations: 0 })
        }
        SimulationMode::Orbit => {
            let map = map.ok_or_else(|| Error::config("orbit mode needs a map descriptor"))?;
            let y = map.inducing_set()?;
            let rows: Vec<Result<(f64, u64)>> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(seed, trial);
                    let x0 = y.0 + (y.1 - y.0) * rng.gen::<f64>();
                    let o = crate::maps::orbit(map, x0, n)?;
                    Ok((o.last_visit as f64 / nf, o.perturbations as u64))
                })
                .collect();
            let mut values = Vec::with_capacity(trials);
            let mut perturbations = 0;
            for r in rows {
                let (v, p) = r?;
                values.push(v);
                perturbations += p;
            }
            Ok(LastVisitSample { n, values, seed, trials, mode, perturbations })
        }
    }
}

/// `sup_x |F_n(x) − F(x)|` for the empirical CDF of `sample`.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::config("empty sample"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d = 0f64;
    let mut i = 0;
    while i < xs.len() {
        // ties: the empirical CDF jumps over the whole run
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((j + 1) as f64 / n - f).max(f - i as f64 / n);
        i = j + 1;
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSampleKs {
    pub statistic: f64,
    /// Asymptotic Kolmogorov p-value.
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov statistic with its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TwoSampleKs> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::config("empty sample"));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    Ok(TwoSampleKs { statistic: d, p_value: kolmogorov_survival(lambda) })
}
