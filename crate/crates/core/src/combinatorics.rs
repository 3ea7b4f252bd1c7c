//! Exact path counting for the Stratmann-Vogt coding and the lacunary-clock
//! walk of the Fibonacci system.
//!
//! Levels are numbered from 1. From level `i` the walk may jump to any level
//! `j ≥ i − 1` (levels 1 and 2 reach every level). The inducing set is level 1.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BranchClass, InducedModel, Multiplicity, PowerTerm, TailCorrection, TailLaw};
use crate::numerics::NeumaierSum;
use crate::Real;

/// `C_n = binom(2n, n)/(n + 1)`.
pub fn catalan(n: u64) -> BigUint {
    let mut c = BigUint::one();
    for k in 0..n {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
    }
    c
}

/// `C_0, …, C_n`.
pub fn catalan_table(n: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    out.push(c.clone());
    for k in 0..n {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
        out.push(c.clone());
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Step {
    Up,
    Down,
}

/// Balanced word over `{u, d}` whose prefixes never have more downs than ups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DyckWord(Vec<Step>);

impl DyckWord {
    pub fn new(letters: Vec<Step>) -> Result<Self> {
        let mut height = 0i64;
        for (i, s) in letters.iter().enumerate() {
            height += if *s == Step::Up { 1 } else { -1 };
            if height < 0 {
                return Err(Error::InvalidDyck { position: i, reason: "prefix has more downs than ups".into() });
            }
        }
        if height != 0 {
            return Err(Error::InvalidDyck {
                position: letters.len(),
                reason: format!("unbalanced word (final height {height})"),
            });
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[Step] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every Dyck word with `k` ups, in lexicographic order (`u < d`).
    pub fn all(k: usize) -> Vec<DyckWord> {
        fn go(k: usize, ups: usize, downs: usize, cur: &mut Vec<Step>, out: &mut Vec<DyckWord>) {
            if ups == k && downs == k {
                out.push(DyckWord(cur.clone()));
                return;
            }
            if ups < k {
                cur.push(Step::Up);
                go(k, ups + 1, downs, cur, out);
                cur.pop();
            }
            if downs < ups {
                cur.push(Step::Down);
                go(k, ups, downs + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(k, 0, 0, &mut Vec::with_capacity(2 * k), &mut out);
        out
    }
}

impl fmt::Display for DyckWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if *s == Step::Up { "u" } else { "d" })?;
        }
        Ok(())
    }
}

impl FromStr for DyckWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                'u' | 'U' => Ok(Step::Up),
                'd' | 'D' => Ok(Step::Down),
                other => Err(Error::InvalidDyck { position: i, reason: format!("unexpected letter {other:?}") }),
            })
            .collect::<Result<Vec<_>>>()?;
        DyckWord::new(letters)
    }
}

/// Excursion `(2, i₁, …, i_{k−1}, 2)` from level 2 back to level 2 that never
/// visits level 1. The single-element path `[2]` is the empty excursion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LevelPath(Vec<u32>);

impl LevelPath {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.first() != Some(&2) || levels.last() != Some(&2) {
            return Err(Error::config("level path must start and end at level 2"));
        }
        for w in levels.windows(2) {
            if w[1] < 2 {
                return Err(Error::config("level path visits level 1"));
            }
            if w[1] + 1 < w[0] {
                return Err(Error::config(format!("illegal transition {} -> {}", w[0], w[1])));
            }
        }
        Ok(Self(levels))
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    /// Number of transitions.
    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    /// `u^{1+i₁−2} d u^{1+i₂−i₁} d … u^{1+2−i_{k−1}} d`.
    pub fn encode(&self) -> DyckWord {
        let mut letters = Vec::with_capacity(2 * self.steps());
        for w in self.0.windows(2) {
            let ups = 1 + w[1] as i64 - w[0] as i64;
            letters.extend(std::iter::repeat(Step::Up).take(ups as usize));
            letters.push(Step::Down);
        }
        DyckWord(letters)
    }

    pub fn decode(word: &DyckWord) -> LevelPath {
        let mut levels = vec![2u32];
        let mut ups = 0u32;
        for s in word.letters() {
            match s {
                Step::Up => ups += 1,
                Step::Down => {
                    let prev = *levels.last().expect("nonempty");
                    levels.push(prev + ups - 1);
                    ups = 0;
                }
            }
        }
        LevelPath(levels)
    }
}

/// Paths `1 → i₁ → … → i_{n−1} → 1` of `n` transitions that avoid level 1 in
/// between, counted by dynamic programming over levels.
pub fn count_first_returns(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    if n == 1 {
        return BigUint::one();
    }
    // after the first jump the walk sits on some level ≥ 2; it must come back
    // to level 2 within n − 2 further steps, so levels above n are useless
    let cap = n as usize + 1;
    let mut cur = vec![BigUint::zero(); cap + 1];
    for slot in cur.iter_mut().skip(2) {
        *slot = BigUint::one();
    }
    for _ in 0..n - 2 {
        // new[j] = Σ_{i ≤ j+1, i ≥ 2} cur[i]
        let mut next = vec![BigUint::zero(); cap + 1];
        let mut prefix = BigUint::zero();
        for i in 2..=cap {
            prefix += &cur[i];
            if i >= 3 {
                next[i - 1] = prefix.clone();
            }
        }
        next[cap] = prefix;
        cur = next;
    }
    // the last step returns to level 1 from level 2
    cur[2].clone()
}

/// Same count by depth-first enumeration of every admissible path; limited
/// to `n ≤ 25`.
pub fn count_first_returns_exhaustive(n: u64) -> Result<u64> {
    if n > 25 {
        return Err(Error::config(format!("exhaustive enumeration limited to n ≤ 25, got {n}")));
    }
    if n == 0 {
        return Ok(0);
    }
    fn walk(level: u32, left: u64) -> u64 {
        // `left` transitions remain, the last of which must be 2 → 1
        if left == 1 {
            return u64::from(level == 2);
        }
        // levels above 1 + left cannot come back in time
        let top = 1 + left as u32;
        let lo = level.saturating_sub(1).max(2);
        (lo..=top).map(|j| walk(j, left - 1)).sum()
    }
    if n == 1 {
        return Ok(1);
    }
    Ok((2..=n as u32 + 1).map(|j| walk(j, n - 1)).sum())
}

/// Fibonacci clock values `S₀, S₁, … = 1, 2, 3, 5, 8, …`.
pub fn fibonacci(k: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::one(), BigUint::from(2u32));
    for _ in 0..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

pub fn golden_mean<T: Real>() -> T {
    (T::one() + T::lit(5.0).sqrt()) / T::lit(2.0)
}

/// `β = log((1−λ)/λ)/log G`.
pub fn beta_of_lambda<T: Real>(lambda: T) -> T {
    ((T::one() - lambda) / lambda).ln() / golden_mean::<T>().ln()
}

/// Lower end `2/(3+√5)` of the infinite-measure range of `λ`.
pub fn lambda_lower<T: Real>() -> T {
    T::lit(2.0) / (T::lit(3.0) + T::lit(5.0).sqrt())
}

fn check_sv_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda > T::zero() && lambda <= T::lit(0.5)) {
        return Err(Error::config(format!("λ = {lambda} outside (0, 1/2]")));
    }
    Ok(())
}

/// Class model of the first return to level 1 under the potential
/// `−t·log|T′|`: `C_{n−1}` branches of time `n`, each with weight
/// `(1−λ)^t[λ(1−λ)]^{t(n−1)}`. At `λ = ½, t = 1` the classes beyond `n_max`
/// follow the exact asymptotic tail `binom(2n,n)/4^n`; otherwise they are
/// extrapolated from the last classes.
pub fn sv_model<T: Real>(lambda: T, t: T, n_max: u64) -> Result<InducedModel<T>> {
    check_sv_lambda(lambda)?;
    if n_max < 10 {
        return Err(Error::config(format!("n_max = {n_max} below 10")));
    }
    if !t.is_finite() {
        return Err(Error::config("t must be finite"));
    }
    const EXACT: u64 = 4096;
    let w1 = t * (T::one() - lambda).ln();
    let step = t * (lambda * (T::one() - lambda)).ln();
    let mut classes = Vec::with_capacity(n_max as usize);
    let mut c = BigUint::one();
    let mut ln_c = 0.0f64;
    for n in 1..=n_max {
        let k = n - 1;
        let count = if k <= EXACT {
            if k > 0 {
                c = c * BigUint::from(2 * (2 * k - 1)) / BigUint::from(k + 1);
            }
            ln_c = crate::model::multiplicity::ln_big(&c);
            Multiplicity::from_big(c.clone())
        } else {
            // C_k / C_{k−1} = 2(2k−1)/(k+1)
            ln_c += ((4 * k - 2) as f64 / (k + 1) as f64).ln();
            Multiplicity::Log(ln_c)
        };
        classes.push(BranchClass::new(n, count, w1 + step * T::idx(k)));
    }
    let half = T::lit(0.5);
    let tail = if lambda == half && t == T::one() {
        let c = T::one() / T::PI().sqrt();
        Some(TailLaw::with_correction(
            half,
            c,
            TailCorrection::Powers {
                terms: vec![
                    PowerTerm { coef: -c / T::lit(8.0), exponent: T::lit(1.5) },
                    PowerTerm { coef: c / T::lit(128.0), exponent: T::lit(2.5) },
                ],
            },
        )?)
    } else {
        None
    };
    InducedModel::new(classes, tail)
}

/// Time cost of a visit to a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clock {
    /// Every visit costs one unit (the Stratmann-Vogt return time).
    Unit,
    /// A visit to level `m` costs `S_{m−1}`.
    Fibonacci,
}

impl Clock {
    fn costs(self, levels: usize) -> Vec<u64> {
        let mut out = vec![0u64; levels + 1];
        let (mut a, mut b) = (1u64, 2u64);
        for (m, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = match self {
                Clock::Unit => 1,
                Clock::Fibonacci => {
                    let v = a;
                    let c = a.saturating_add(b);
                    a = b;
                    b = c;
                    let _ = m;
                    v
                }
            };
        }
        out
    }

    /// Number of levels that can influence returns up to time `n_max`.
    pub fn levels_for(self, n_max: u64) -> usize {
        match self {
            Clock::Unit => n_max as usize / 2 + 3,
            Clock::Fibonacci => {
                let g: f64 = golden_mean();
                ((n_max.max(2) as f64).ln() / g.ln()).ceil() as usize + 2
            }
        }
    }
}

/// Outcome of the clocked walk started on level 1 at time 0.
#[derive(Clone, Debug, Serialize)]
pub struct ClockedWalk<W> {
    pub levels: usize,
    /// Weight returning to level 1 at exactly time `n` (index `n`).
    pub returned: Vec<W>,
    /// Weight not yet returned after time `n` (index `n`).
    pub pending: Vec<W>,
    /// Total arrival weight per level `1..=levels` (index `m − 1`), the start
    /// counted as one visit to level 1.
    pub visits: Vec<W>,
    /// Weight that escaped above the top level.
    pub overflow: W,
}

/// Generic time-indexed walk. `c[m]` is the weight paid on leaving level `m`
/// and jumps `m → l` carry `λ^{l−m}`.
fn clocked_walk_core<W>(lambda: &W, c: &[W], costs: &[u64], n_max: u64) -> ClockedWalk<W>
where
    W: Clone + Zero + One + Add<Output = W> + Sub<Output = W> + Mul<Output = W> + Div<Output = W>,
{
    let levels = c.len() - 1;
    let n = n_max as usize;
    let lam_inv = W::one() / lambda.clone();
    let spill = lambda.clone() / (W::one() - lambda.clone());
    // a visit to level m arriving at time T leaves at T + cost; the slot
    // T mod cost is read on departure and refilled by the arrival at the
    // same instant, so each level keeps a ring of `cost` entries
    let mut rings: Vec<Vec<W>> = costs
        .iter()
        .map(|&k| vec![W::zero(); (k.max(1) as usize).min(n + 1)])
        .collect();
    rings[1][0] = W::one();
    let mut returned = vec![W::zero(); n + 1];
    let mut pending = vec![W::zero(); n + 1];
    let mut visits = vec![W::zero(); levels];
    visits[0] = W::one();
    let mut overflow = W::zero();
    let mut pend = W::one();
    pending[0] = W::one();
    let mut depart = vec![W::zero(); levels + 2];
    for time in 1..=n {
        for m in 1..=levels {
            let ring = &mut rings[m];
            let slot = time % ring.len();
            let a = std::mem::replace(&mut ring[slot], W::zero());
            depart[m] = if a.is_zero() || (costs[m] as usize) > time {
                W::zero()
            } else {
                pend = pend - a.clone();
                a * c[m].clone()
            };
        }
        // g[l] = Σ_{m ≤ l+1} depart[m] λ^{l−m}
        let mut g = depart[1].clone() + depart[2].clone() * lam_inv.clone();
        returned[time] = g.clone();
        for l in 2..=levels {
            let next = if l < levels { depart[l + 1].clone() * lam_inv.clone() } else { W::zero() };
            g = lambda.clone() * g + next;
            if !g.is_zero() {
                let ring = &mut rings[l];
                let slot = time % ring.len();
                ring[slot] = g.clone();
                visits[l - 1] = visits[l - 1].clone() + g.clone();
                pend = pend + g.clone();
            }
        }
        // g now equals Σ_{m ≤ levels} depart[m] λ^{levels−m}
        let out = g * spill.clone();
        overflow = overflow + out.clone();
        pend = pend + out;
        pending[time] = pend.clone();
    }
    ClockedWalk { levels, returned, pending, visits, overflow }
}

fn walk_weights<T: Real>(lambda: T, t: T, u: T, costs: &[u64]) -> Vec<T> {
    let first = (T::one() - lambda).powf(t);
    let rest = (lambda * (T::one() - lambda)).powf(t);
    (0..costs.len())
        .map(|m| match m {
            0 => T::zero(),
            1 => first * (-u * T::idx(costs[1])).exp(),
            _ => rest * (-u * T::idx(costs[m])).exp(),
        })
        .collect()
}

/// Clocked walk with per-visit weight `slope^{−t}·e^{−u·cost}`. With
/// `t = 1, u = 0` the kernel is stochastic and
/// `returned + pending = 1` at every horizon.
pub fn clocked_walk<T: Real>(
    lambda: T,
    t: T,
    u: T,
    n_max: u64,
    clock: Clock,
    levels: Option<usize>,
) -> Result<ClockedWalk<T>> {
    check_sv_lambda(lambda)?;
    if lambda == T::lit(0.5) && clock == Clock::Fibonacci {
        return Err(Error::config("λ = 1/2 is outside the Fibonacci range"));
    }
    let levels = levels.unwrap_or_else(|| clock.levels_for(n_max)).max(2);
    let costs = clock.costs(levels);
    let c = walk_weights(lambda, t, u, &costs);
    Ok(clocked_walk_core(&lambda, &c, &costs, n_max))
}

/// Exact rational walk at `t = 1, u = 0`.
pub fn clocked_walk_exact(
    lambda: &BigRational,
    n_max: u64,
    clock: Clock,
    levels: Option<usize>,
) -> Result<ClockedWalk<BigRational>> {
    let half = BigRational::new(1.into(), 2.into());
    if !(lambda > &BigRational::zero() && lambda <= &half) {
        return Err(Error::config("λ outside (0, 1/2]"));
    }
    let levels = levels.unwrap_or_else(|| clock.levels_for(n_max)).max(2);
    let costs = clock.costs(levels);
    let one = BigRational::one();
    let c: Vec<BigRational> = (0..=levels)
        .map(|m| match m {
            0 => BigRational::zero(),
            1 => &one - lambda,
            _ => lambda * (&one - lambda),
        })
        .collect();
    Ok(clocked_walk_core(lambda, &c, &costs, n_max))
}

/// Tail of the reinduced return time of the Fibonacci system.
#[derive(Clone, Debug, Serialize)]
pub struct FibWalk<T> {
    pub lambda: T,
    pub beta: T,
    /// `μ̂(τ > n)` for `n = 0..=n_max`.
    pub tail: Vec<T>,
    /// `μ̂(τ = n)` for `n = 0..=n_max`.
    pub classes: Vec<T>,
    pub overflow: T,
    pub levels: usize,
}

/// Lacunary-clock DP: levels cost `S_{m−1}` time units, transitions carry
/// `[λ(1−λ)]^t e^{−u·cost}`.
pub fn fib_walk_dp<T: Real>(lambda: T, t: T, u: T, n_max: u64) -> Result<FibWalk<T>> {
    if !(lambda > lambda_lower::<T>() && lambda < T::lit(0.5)) {
        return Err(Error::config(format!("λ = {lambda} outside (2/(3+√5), 1/2)")));
    }
    if n_max == 0 || n_max > 10_000_000 {
        return Err(Error::config(format!("n_max = {n_max} out of range")));
    }
    let walk = clocked_walk(lambda, t, u, n_max, Clock::Fibonacci, None)?;
    Ok(FibWalk {
        lambda,
        beta: beta_of_lambda(lambda),
        tail: walk.pending,
        classes: walk.returned,
        overflow: walk.overflow,
        levels: walk.levels,
    })
}

/// Normalised level occupation of the unit-clock walk at `t = 1`, i.e. the
/// law of the clock value `σ = S_{m−1}` under the induced measure.
pub fn level_marginal<T: Real>(lambda: T, levels: usize, horizon: u64) -> Result<Vec<T>> {
    let walk = clocked_walk(lambda, T::one(), T::zero(), horizon, Clock::Unit, Some(levels))?;
    let total = walk.visits.iter().copied().fold(NeumaierSum::new(), |mut a, v| {
        a.add(v);
        a
    });
    let total = total.value();
    Ok(walk.visits.iter().map(|v| *v / total).collect())
}

/// `ln Δ_k = ln binom(2k, M+k) + k·ln(λ(1−λ))`.
pub fn reflection_delta<T: Real>(k: u64, m: u64, lambda: T) -> Result<T> {
    if m == 0 || m > k {
        return Err(Error::config(format!("need 1 ≤ M ≤ k, got M = {m}, k = {k}")));
    }
    // ln binom(2k, k+M) = Σ_{i=1}^{k−M} ln((k+M+i)/i)
    let mut acc = NeumaierSum::new();
    for i in 1..=k - m {
        acc.add((((k + m + i) as f64) / i as f64).ln());
    }
    Ok(T::lit(acc.value()) + T::idx(k) * (lambda * (T::one() - lambda)).ln())
}

/// Exact `Δ_k` for rational `λ`.
pub fn reflection_delta_exact(k: u64, m: u64, lambda: &BigRational) -> Result<BigRational> {
    if m == 0 || m > k {
        return Err(Error::config(format!("need 1 ≤ M ≤ k, got M = {m}, k = {k}")));
    }
    let p = lambda * (BigRational::one() - lambda);
    let mut pow = BigRational::one();
    for _ in 0..k {
        pow = pow * &p;
    }
    Ok(BigRational::from_integer(binomial(2 * k, m + k).into()) * pow)
}

/// `argmax_{k ≥ M} Δ_k`, scanning until `Δ_k` has decayed well past its peak.
/// Steps use `Δ_{k+1}/Δ_k = p(2k+2)(2k+1)/((k+M+1)(k−M+1))`.
pub fn reflection_argmax<T: Real>(m: u64, lambda: T) -> Result<u64> {
    let ln_p = (lambda * (T::one() - lambda)).ln();
    let mut v = reflection_delta(m, m, lambda)?;
    let mut best = (m, v);
    let mut k = m;
    loop {
        let kf = T::idx(k);
        let mf = T::idx(m);
        let two = T::lit(2.0);
        v = v + ln_p + ((two * kf + two) * (two * kf + T::one()) / ((kf + mf + T::one()) * (kf - mf + T::one()))).ln();
        k += 1;
        if v > best.1 {
            best = (k, v);
        }
        if k > 2 * best.0 + 10 && v < best.1 - T::lit(50.0) {
            break;
        }
        if k > 100_000_000 {
            return Err(Error::numerical("Δ_k argmax scan did not terminate"));
        }
    }
    Ok(best.0)
}
