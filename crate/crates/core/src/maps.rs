//! Concrete interval maps and the induced models they generate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BranchClass, InducedModel, Multiplicity, PowerTerm, TailCorrection, TailLaw};
use crate::Real;

/// The map families the laboratory knows how to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapFamily<T> {
    /// `x(1 + 2^α x^α)` on `[0, ½]`, `b(2x − 1)` on `(½, 1]`.
    PomeauManneville { alpha: T, b: T },
    /// `1 − 2e^{−b(|x|^{−α} − 1)}` on `[−1, 1]`.
    Flat { alpha: T, b: T },
    /// Piecewise linear map with first-return tail `(n+1)^{−β}`.
    GaspardWang { beta: T },
    StratmannVogt { lambda: T },
    Fibonacci { lambda: T },
}

/// A map family with its forward and inverse branches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalMapDescriptor<T> {
    pub family: MapFamily<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cylinder<T> {
    /// First return time on the cylinder.
    pub n: u64,
    pub left: T,
    pub right: T,
    pub representative: T,
    /// `e^{S_nφ}` at the representative point.
    pub weight: T,
}

/// Cylinders `{τ = n}` of a first-return map, in increasing `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderTable<T> {
    pub domain: (T, T),
    pub rows: Vec<Cylinder<T>>,
}

impl<T: Real> CylinderTable<T> {
    pub fn total_length(&self) -> T {
        self.rows.iter().map(|c| c.right - c.left).sum()
    }
}

/// `x(1 + 2^α x^α)`.
#[inline]
fn pm_left<T: Real>(alpha: T, x: T) -> T {
    x * (T::one() + (T::lit(2.0) * x).powf(alpha))
}

#[inline]
fn pm_left_deriv<T: Real>(alpha: T, x: T) -> T {
    T::one() + (T::one() + alpha) * (T::lit(2.0) * x).powf(alpha)
}

/// Solves `x(1 + 2^α x^α) = y` on `[0, y]` by bisection with a Newton polish.
pub fn pm_left_inverse<T: Real>(alpha: T, y: T) -> Result<T> {
    if !(y >= T::zero()) {
        return Err(Error::numerical(format!("left-branch preimage of {y}")));
    }
    if y == T::zero() {
        return Ok(T::zero());
    }
    let (mut lo, mut hi) = (T::zero(), y);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if pm_left(alpha, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::lit(1e-6) * hi {
            break;
        }
    }
    let mut x = (lo + hi) * T::lit(0.5);
    for _ in 0..50 {
        let step = (pm_left(alpha, x) - y) / pm_left_deriv(alpha, x);
        let next = (x - step).max(lo).min(hi);
        let done = (next - x).abs() <= T::lit(1e-15) * x;
        x = next;
        if done {
            break;
        }
    }
    if !x.is_finite() {
        return Err(Error::numerical(format!("left-branch inverse failed at y = {y}")));
    }
    Ok(x)
}

/// `V_+(y) = (1 − log((1−y)/2)/b)^{−β}`.
fn flat_v_plus<T: Real>(beta: T, b: T, y: T) -> T {
    (T::one() - ((T::one() - y) / T::lit(2.0)).ln() / b).powf(-beta)
}

/// Orientation-reversing fixed point of the flat map.
pub fn flat_fixed_point<T: Real>(alpha: T, b: T) -> Result<T> {
    // f(x) − x is decreasing on (0, 1]
    let g = |x: T| T::one() - T::lit(2.0) * (-b * (x.powf(-alpha) - T::one())).exp() - x;
    let (mut lo, mut hi) = (T::lit(1e-6), T::one());
    if !(g(lo) > T::zero() && g(hi) < T::zero()) {
        return Err(Error::numerical("flat map fixed point not bracketed"));
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < T::eps() * T::lit(4.0) {
            break;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

impl<T: Real> IntervalMapDescriptor<T> {
    pub fn new(family: MapFamily<T>) -> Result<Self> {
        let d = Self { family };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            MapFamily::PomeauManneville { alpha, b } => {
                if !(*alpha > T::one()) {
                    return Err(Error::config(format!("α = {alpha} must exceed 1")));
                }
                if !(*b > T::zero() && *b <= T::one()) {
                    return Err(Error::config(format!("b = {b} outside (0, 1]")));
                }
            }
            MapFamily::Flat { alpha, b } => {
                if !(*alpha > T::zero() && *b > T::zero()) {
                    return Err(Error::config("flat map needs α > 0 and b > 0"));
                }
                if !(T::lit(2.0) * *alpha * *b > T::one()) {
                    return Err(Error::config("flat map needs |f′(1)| = 2αb > 1"));
                }
            }
            MapFamily::GaspardWang { beta } => {
                if !(*beta > T::zero() && *beta < T::one()) {
                    return Err(Error::config(format!("β = {beta} outside (0,1)")));
                }
            }
            MapFamily::StratmannVogt { lambda } => {
                if !(*lambda > T::zero() && *lambda <= T::lit(0.5)) {
                    return Err(Error::config(format!("λ = {lambda} outside (0, 1/2]")));
                }
            }
            MapFamily::Fibonacci { lambda } => {
                let lo = crate::combinatorics::lambda_lower::<T>();
                if !(*lambda > lo && *lambda < T::lit(0.5)) {
                    return Err(Error::config(format!("λ = {lambda} outside (2/(3+√5), 1/2)")));
                }
            }
        }
        Ok(())
    }

    /// Inducing set `Y` as an interval `(lo, hi]`.
    pub fn inducing_set(&self) -> Result<(T, T)> {
        match &self.family {
            MapFamily::PomeauManneville { .. } => Ok((T::lit(0.5), T::one())),
            MapFamily::Flat { alpha, b } => {
                let p = flat_fixed_point(*alpha, *b)?;
                Ok((-p, p))
            }
            MapFamily::GaspardWang { beta } => Ok((T::lit(2.0).powf(-*beta), T::one())),
            _ => Err(Error::config("no interval realisation for this family")),
        }
    }

    pub fn in_inducing_set(&self, x: T, y: (T, T)) -> bool {
        match &self.family {
            MapFamily::Flat { .. } => x > y.0 && x < y.1,
            _ => x > y.0 && x <= y.1,
        }
    }

    /// One forward step.
    pub fn forward(&self, x: T) -> Result<T> {
        match &self.family {
            MapFamily::PomeauManneville { alpha, b } => Ok(if x <= T::lit(0.5) {
                pm_left(*alpha, x)
            } else {
                *b * (T::lit(2.0) * x - T::one())
            }),
            MapFamily::Flat { alpha, b } => Ok(if x == T::zero() {
                T::one()
            } else {
                T::one() - T::lit(2.0) * (-*b * (x.abs().powf(-*alpha) - T::one())).exp()
            }),
            MapFamily::GaspardWang { beta } => {
                let x0 = T::lit(2.0).powf(-*beta);
                if x > x0 {
                    return Ok((x - x0) / (T::one() - x0));
                }
                if x <= T::zero() {
                    return Ok(T::zero());
                }
                // J_k = ((k+2)^{−β}, (k+1)^{−β}] maps affinely onto J_{k−1}
                // (J_0 standing for the inducing set)
                let k = (x.powf(-beta.recip()).floor() - T::one()).max(T::one());
                let edge = |j: T| if j == T::zero() { T::one() } else { (j + T::one()).powf(-*beta) };
                let (a, c) = (edge(k + T::one()), edge(k));
                let (a2, c2) = (edge(k), edge(k - T::one()));
                Ok(a2 + (x - a) * (c2 - a2) / (c - a))
            }
            _ => Err(Error::config("no interval realisation for this family")),
        }
    }

    /// `|f′(x)|`.
    pub fn derivative(&self, x: T) -> Result<T> {
        match &self.family {
            MapFamily::PomeauManneville { alpha, b } => Ok(if x <= T::lit(0.5) {
                pm_left_deriv(*alpha, x)
            } else {
                T::lit(2.0) * *b
            }),
            MapFamily::Flat { alpha, b } => {
                let ax = x.abs();
                if ax == T::zero() {
                    return Ok(T::zero());
                }
                let e = (-*b * (ax.powf(-*alpha) - T::one())).exp();
                Ok(T::lit(2.0) * e * *b * *alpha * ax.powf(-*alpha - T::one()))
            }
            _ => Err(Error::config("derivative not available for this family")),
        }
    }

    /// All preimages of `y`, one per branch.
    pub fn inverse_branches(&self, y: T) -> Result<Vec<T>> {
        match &self.family {
            MapFamily::PomeauManneville { alpha, b } => {
                let mut out = Vec::new();
                if y >= T::zero() && y <= T::one() {
                    out.push(pm_left_inverse(*alpha, y)?);
                }
                if y > T::zero() && y <= *b {
                    out.push((y / *b + T::one()) / T::lit(2.0));
                }
                Ok(out)
            }
            MapFamily::Flat { alpha, b } => {
                if !(y >= -T::one() && y < T::one()) {
                    return Ok(Vec::new());
                }
                let v = flat_v_plus(alpha.recip(), *b, y);
                Ok(vec![-v, v])
            }
            _ => Err(Error::config("inverse branches not available for this family")),
        }
    }
}

/// Backward orbit `x₀ = ½, x_{k+1} = L^{−1}(x_k)` of the neutral branch.
pub fn pm_backward_orbit<T: Real>(alpha: T, n: usize) -> Result<Vec<T>> {
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(T::lit(0.5));
    for k in 0..n {
        let next = pm_left_inverse(alpha, xs[k])?;
        xs.push(next);
    }
    Ok(xs)
}

/// First-return cylinders of the Pomeau-Manneville map to `(½, 1]` with
/// weights `|(f^τ)′|^{−t}` at cylinder midpoints.
pub fn pm_cylinders<T: Real>(alpha: T, b: T, t: T, n_max: u64) -> Result<CylinderTable<T>> {
    IntervalMapDescriptor::new(MapFamily::PomeauManneville { alpha, b })?;
    let xs = pm_backward_orbit(alpha, n_max as usize)?;
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut rows = Vec::with_capacity(n_max as usize);
    // τ = k + 1 when f(y) ∈ (x_k, x_{k−1}] with x_{−1} = b
    for k in 0..n_max as usize {
        let lo_img = xs[k];
        let hi_img = if k == 0 { b } else { xs[k - 1].min(b) };
        if hi_img <= lo_img {
            continue;
        }
        let left = (T::one() + lo_img / b) * half;
        let right = (T::one() + hi_img / b) * half;
        let mid = (left + right) * half;
        let mut z = b * (two * mid - T::one());
        let mut log_deriv = (two * b).ln();
        for _ in 0..k {
            log_deriv = log_deriv + pm_left_deriv(alpha, z).ln();
            z = pm_left(alpha, z);
        }
        rows.push(Cylinder {
            n: k as u64 + 1,
            left,
            right,
            representative: mid,
            weight: (-t * log_deriv).exp(),
        });
    }
    Ok(CylinderTable { domain: (half, T::one()), rows })
}

/// Induced model of the Pomeau-Manneville map on `(½, 1]`; classes beyond
/// `n_max` are extrapolated from the last cylinders.
pub fn pm_induced_model<T: Real>(alpha: T, b: T, t: T, n_max: u64) -> Result<InducedModel<T>> {
    if n_max < 64 {
        return Err(Error::config(format!("n_max = {n_max} below 64")));
    }
    let table = pm_cylinders(alpha, b, t, n_max)?;
    let classes = table
        .rows
        .iter()
        .map(|c| BranchClass::new(c.n, Multiplicity::one(), c.weight.ln()))
        .collect();
    InducedModel::new(classes, None)
}

/// Flat-map data: the model, the sizes `a_n` of `{τ > n} = (−a_n, a_n)` and
/// the renormalised constants `ζ_n` with `1 − f(a_n) = ζ_n r^n`.
#[derive(Clone, Debug)]
pub struct FlatModel<T: Real> {
    pub model: InducedModel<T>,
    pub fixed_point: T,
    pub a: Vec<T>,
    pub ln_zeta: Vec<T>,
    pub r: T,
}

/// Builds the flat-critical-point model. `a_0 = a_1 = p`,
/// `a_n = V_+ V_+ V_−^{n−1}(p)` for `n ≥ 2`, iterated in log-distance to
/// the fixed point `−1`; the induced density is taken uniform on `(−p, p)`,
/// so `μ(τ > n) = a_n/p`.
pub fn flat_induced_model<T: Real>(alpha: T, b: T, n_max: u64) -> Result<FlatModel<T>> {
    IntervalMapDescriptor::new(MapFamily::Flat { alpha, b })?;
    if n_max < 64 {
        return Err(Error::config(format!("n_max = {n_max} below 64")));
    }
    let beta = alpha.recip();
    let p = flat_fixed_point(alpha, b)?;
    let r = (T::lit(2.0) * alpha * b).recip();
    let ln_r = r.ln();
    let ln2 = T::lit(2.0).ln();
    // distance map d ↦ 1 + V_−(−1 + d)
    let shrink = |d: T| -> T {
        let l = -(-d / T::lit(2.0)).ln_1p() / b;
        -(-beta * l.ln_1p()).exp_m1()
    };
    let ln_tiny = T::min_positive_value().sqrt().ln();
    let mut a = vec![p, p];
    let mut ln_zeta = vec![T::zero(), T::zero()];
    // V_−(p) = −p, so start from distance 1 − p
    let mut ln_d = (T::one() - p).ln();
    for n in 2..=n_max {
        // ln d'' with d'' = 1 − V_+(−1 + d)
        let ln_dd = if ln_d > ln_tiny { shrink(ln_d.exp()).ln() } else { ln_d + ln_r };
        let an = (T::one() + (ln2 - ln_dd) / b).powf(-beta);
        if !an.is_finite() || an <= T::zero() {
            return Err(Error::numerical(format!("a_n underflow at n = {n}")));
        }
        a.push(an);
        ln_zeta.push(ln_dd - T::idx(n) * ln_r);
        ln_d = ln_dd;
    }
    let masses: Vec<(u64, T)> = (1..=n_max as usize)
        .map(|n| (n as u64, (a[n - 1] - a[n]) / p))
        .filter(|(_, m)| *m > T::zero())
        .collect();
    let classes = masses
        .into_iter()
        .map(|(n, m)| BranchClass::single(n, m))
        .collect();
    let model = InducedModel::new(classes, None)?;
    Ok(FlatModel { model, fixed_point: p, a, ln_zeta, r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    /// `μ̄(τ > n) = (n+1)^{−β}`.
    ExactPower,
    /// `μ̄(τ > n) = ½n^{−β} + ½n^{−1−β}` for `n ≥ 1`.
    WithCorrections,
}

/// Scalar reference model with prescribed tails and single-branch classes.
pub fn gaspard_wang_model<T: Real>(beta: T, kind: TailKind, n_max: u64) -> Result<InducedModel<T>> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(Error::config(format!("β = {beta} outside (0,1)")));
    }
    if n_max < 10 {
        return Err(Error::config(format!("n_max = {n_max} below 10")));
    }
    match kind {
        TailKind::ExactPower => {
            // n^{−β} − (n+1)^{−β} without cancellation
            let classes = (1..=n_max)
                .map(|n| {
                    let x = T::idx(n);
                    let m = -x.powf(-beta) * (-beta * x.recip().ln_1p()).exp_m1();
                    BranchClass::single(n, m)
                })
                .collect();
            let law = TailLaw::with_correction(beta, T::one(), TailCorrection::Shifted { shift: T::one() })?;
            InducedModel::new(classes, Some(law))
        }
        TailKind::WithCorrections => {
            let half = T::lit(0.5);
            let law = TailLaw::with_correction(
                beta,
                half,
                TailCorrection::Powers { terms: vec![PowerTerm { coef: half, exponent: T::one() + beta }] },
            )?;
            // tail(1) = 1, so the first class is empty
            let classes = (2..=n_max)
                .map(|n| BranchClass::single(n, law.ln_mass(T::idx(n)).exp()))
                .collect();
            InducedModel::new(classes, Some(law))
        }
    }
}

/// Float orbit summary relative to the inducing set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSummary {
    /// Times `j ≤ n` with `f^j x ∈ Y`.
    pub visits: Vec<u64>,
    /// `Z_n = max{0 ≤ j ≤ n : f^j x ∈ Y}` (0 when there is no visit).
    pub last_visit: u64,
    /// Gaps between consecutive visits.
    pub return_times: Vec<u64>,
    /// How many times the orbit was nudged off a branch endpoint.
    pub perturbations: u32,
}

/// Iterates the map `n` times from `x0` and records visits to `Y`.
pub fn orbit<T: Real>(map: &IntervalMapDescriptor<T>, x0: T, n: u64) -> Result<OrbitSummary> {
    let y = map.inducing_set()?;
    let mut x = x0;
    let mut visits = Vec::new();
    let mut perturbations = 0u32;
    let guard = T::lit(1e-15);
    let nudge = T::lit(1e-13);
    let fixed = match &map.family {
        MapFamily::Flat { .. } => -T::one(),
        _ => T::zero(),
    };
    for j in 0..=n {
        if map.in_inducing_set(x, y) {
            visits.push(j);
        }
        if j == n {
            break;
        }
        x = map.forward(x)?;
        // floating point can land exactly on the indifferent fixed point
        if (x - fixed).abs() < guard {
            x = fixed + nudge;
            perturbations += 1;
        }
    }
    let last_visit = visits.last().copied().unwrap_or(0);
    let return_times = visits.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(OrbitSummary { visits, last_visit, return_times, perturbations })
}

/// First return time of `x ∈ Y` to `Y`, or `None` past `cap` steps.
pub fn first_return<T: Real>(map: &IntervalMapDescriptor<T>, x: T, cap: u64) -> Result<Option<u64>> {
    let y = map.inducing_set()?;
    let mut z = x;
    for n in 1..=cap {
        z = map.forward(z)?;
        if map.in_inducing_set(z, y) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
