//! Induced pressure, the pressure equation `F(u₀, s) = 1` and the asymptotic
//! fits built on top of it.

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::lambda_lower;
use crate::error::{Error, Result};
use crate::model::{ch_constant, InducedModel, PotentialFamily};
use crate::numerics::{
    bisect_secant, gamma, linear_fit, power_law_fit, two_term_fit, FitReport, TwoTermFit,
};
use crate::Real;

/// `log F(u, s)`, computed as `log1p(F − 1)` so values near zero keep their
/// relative accuracy.
pub fn series_pressure<T: Real>(model: &InducedModel<T>, u: T, s: T) -> Result<T> {
    let e = model.excess(u, s)?;
    if !(e > -T::one()) {
        return Err(Error::numerical(format!("nonpositive partition function at u = {u}")));
    }
    Ok(e.ln_1p())
}

/// Log leading eigenvalue of the `n × n` truncation of the Stratmann-Vogt
/// transition matrix, rows weighted by `|T′|^{−t}` and every step by `e^{−u}`.
///
/// Rows 1 and 2 reach every column, row `i ≥ 3` reaches columns `≥ i − 1`,
/// so one product costs `O(n)` through suffix sums.
pub fn matrix_pressure<T: Real>(lambda: T, t: T, u: T, n: usize) -> Result<T> {
    if !(lambda > T::zero() && lambda <= T::lit(0.5)) {
        return Err(Error::config(format!("λ = {lambda} outside (0, 1/2]")));
    }
    if n < 50 {
        return Err(Error::config(format!("truncation N = {n} below 50")));
    }
    if !t.is_finite() || !u.is_finite() {
        return Err(Error::config("t and u must be finite"));
    }
    let w1 = (T::one() - lambda).powf(t);
    let w = (lambda * (T::one() - lambda)).powf(t);
    let apply = |x: &[T], out: &mut [T], suffix: &mut [T]| {
        let mut acc = T::zero();
        for j in (0..n).rev() {
            acc = acc + x[j];
            suffix[j] = acc;
        }
        out[0] = w1 * suffix[0];
        out[1] = w * suffix[0];
        for i in 2..n {
            out[i] = w * suffix[i - 1];
        }
    };
    let mut x = vec![T::one(); n];
    let mut y = vec![T::zero(); n];
    let mut suffix = vec![T::zero(); n];
    let mut rho = T::zero();
    let tol = T::lit(1e-13).max(T::eps() * T::lit(16.0));
    let mut settled = 0;
    for _ in 0..200_000 {
        apply(&x, &mut y, &mut suffix);
        let norm = y.iter().copied().fold(T::zero(), T::max);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::numerical("power iteration lost the iterate"));
        }
        for v in y.iter_mut() {
            *v = *v / norm;
        }
        std::mem::swap(&mut x, &mut y);
        let change = (norm - rho).abs() / norm;
        rho = norm;
        if change < tol {
            settled += 1;
            if settled >= 3 {
                return Ok(rho.ln() - u);
            }
        } else {
            settled = 0;
        }
    }
    Err(Error::numerical("power iteration stagnated"))
}

/// Closed form `log((1−λ)^t/(1−λ^t))` of the Stratmann-Vogt induced pressure.
pub fn sv_closed_form<T: Real>(lambda: T, t: T) -> T {
    t * (T::one() - lambda).ln() - (-lambda.powf(t)).ln_1p()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveKind {
    /// `F(u₀, s) = 1` has a solution.
    Root,
    /// The series diverges below `u₀` and stays `≤ 1` at it.
    Abscissa,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureSolveResult<T> {
    pub kind: SolveKind,
    pub u0: T,
    /// `log F(u₀, s)`: 0 for a root, `≤ 0` at the abscissa.
    pub induced_pressure_at_u0: T,
    pub bracket: (T, T),
    pub residual: T,
    pub evaluations: usize,
    /// Set when `F(abscissa)` is within tolerance of 1.
    pub boundary: bool,
}

const ROOT_FTOL: f64 = 1e-13;
const BOUNDARY_TOL: f64 = 1e-12;

/// `F − 1`, with divergence mapped to `+∞`.
fn excess_or_inf<T: Real>(model: &InducedModel<T>, u: T, s: T) -> Result<T> {
    match model.excess(u, s) {
        Ok(v) => Ok(v),
        Err(Error::DivergentSeries { .. }) => Ok(T::infinity()),
        Err(e) => Err(e),
    }
}

/// Solves the pressure equation `F(u₀, s) = 1`, falling back to the
/// convergence abscissa when the series is already `≤ 1` there.
pub fn solve_u0<T: Real>(model: &InducedModel<T>, s: T) -> Result<PressureSolveResult<T>> {
    if !(s >= T::zero()) || !s.is_finite() {
        return Err(Error::config(format!("s = {s} must be a finite nonnegative number")));
    }
    let ab = model.abscissa(s);
    let mut evals = 0usize;
    let base = if ab.value.is_finite() {
        let e = excess_or_inf(model, ab.value, s)?;
        evals += 1;
        if e.abs() < T::lit(BOUNDARY_TOL) {
            return Ok(PressureSolveResult {
                kind: SolveKind::Root,
                u0: ab.value,
                induced_pressure_at_u0: e.ln_1p(),
                bracket: (ab.value, ab.value),
                residual: e,
                evaluations: evals,
                boundary: true,
            });
        }
        if e < T::zero() {
            return Ok(PressureSolveResult {
                kind: SolveKind::Abscissa,
                u0: ab.value,
                induced_pressure_at_u0: e.ln_1p(),
                bracket: (ab.value - ab.tolerance, ab.value + ab.tolerance),
                residual: e,
                evaluations: evals,
                boundary: false,
            });
        }
        ab.value
    } else {
        // finite system: walk down until F > 1
        let mut lo = -T::one();
        loop {
            evals += 1;
            if excess_or_inf(model, lo, s)? > T::zero() {
                break lo;
            }
            lo = lo * T::lit(2.0);
            if lo < T::lit(-1e6) {
                return Err(Error::numerical("no lower bracket for the pressure equation"));
            }
        }
    };
    // x = u − base; grow the upper end until F < 1, then shrink the lower
    // end geometrically so bisection runs on a log scale
    let f = |x: T| excess_or_inf(model, base + x, s);
    let mut hi = T::lit(1e-3) * (T::one() + base.abs());
    loop {
        evals += 1;
        let v = f(hi)?;
        if v < T::zero() {
            break;
        }
        if v == T::zero() {
            return Ok(PressureSolveResult {
                kind: SolveKind::Root,
                u0: base + hi,
                induced_pressure_at_u0: T::zero(),
                bracket: (base + hi, base + hi),
                residual: v,
                evaluations: evals,
                boundary: false,
            });
        }
        hi = hi * T::lit(4.0);
        if hi > T::lit(1e6) {
            return Err(Error::numerical("no upper bracket for the pressure equation"));
        }
    }
    let mut lo = hi;
    loop {
        lo = lo * T::lit(0.0625);
        evals += 1;
        if lo < T::min_positive_value().sqrt() {
            lo = T::zero();
            break;
        }
        if f(lo)? > T::zero() {
            break;
        }
    }
    let out = bisect_secant(f, lo, hi, T::lit(1e-6), T::lit(ROOT_FTOL))?;
    let residual = out.residual;
    Ok(PressureSolveResult {
        kind: SolveKind::Root,
        u0: base + out.root,
        induced_pressure_at_u0: residual.ln_1p(),
        bracket: (base + out.bracket.0, base + out.bracket.1),
        residual,
        evaluations: evals + out.evaluations,
        boundary: false,
    })
}

/// [`solve_u0`] over a grid, in parallel, results in grid order.
pub fn solve_u0_grid<T: Real>(
    model: &InducedModel<T>,
    s_grid: &[T],
) -> Vec<Result<PressureSolveResult<T>>> {
    s_grid.par_iter().map(|&s| solve_u0(model, s)).collect()
}

/// First-return generating function of the Fibonacci system,
/// `F(u) = c₁[1 + Σ_{l≥2} λ^{l−1} h_l]`, where `h_l` (weight of reaching level
/// 1 from a visit to level `l`) solves an upper-Hessenberg linear system.
/// Returns `+∞` when the truncated kernel has spectral radius `≥ 1`, which
/// shows up as a non-positive solution.
pub fn fib_generating_function<T: Real>(lambda: T, t: T, u: T) -> Result<T> {
    if !(lambda > lambda_lower::<T>() && lambda < T::lit(0.5)) {
        return Err(Error::config(format!("λ = {lambda} outside (2/(3+√5), 1/2)")));
    }
    if !(u >= T::zero()) {
        return Ok(T::infinity());
    }
    // levels until e^{−u·S_{l−1}} is negligible against any growth
    const MAX_LEVELS: usize = 90;
    let mut costs = vec![T::zero(); 1];
    let mut levels = 0;
    let (mut a, mut b) = (T::one(), T::lit(2.0));
    for l in 1..=MAX_LEVELS {
        costs.push(a);
        levels = l;
        if u * a > T::lit(300.0) {
            break;
        }
        (a, b) = (b, a + b);
    }
    let slope1 = (T::one() - lambda).powf(t);
    let slope = (lambda * (T::one() - lambda)).powf(t);
    let c = |l: usize| if l == 1 { slope1 } else { slope } * (-u * costs[l]).exp();
    // unknowns h_2..h_L; row l: h_l − c_l Σ_{j ≥ max(2,l−1)} λ^{j−l} h_j = b_l
    let dim = levels - 1;
    if dim == 0 {
        return Ok(c(1));
    }
    let mut a = vec![vec![T::zero(); dim]; dim];
    let mut b = vec![T::zero(); dim];
    for r in 0..dim {
        let l = r + 2;
        let cl = c(l);
        let start = if l == 2 { 2 } else { l - 1 };
        for j in start..=levels {
            let e = (j as i64 - l as i64) as i32;
            a[r][j - 2] = a[r][j - 2] - cl * lambda.powi(e);
        }
        a[r][r] = a[r][r] + T::one();
        if l == 2 {
            b[r] = cl / lambda;
        }
    }
    // Hessenberg elimination with pivoting between neighbouring rows
    for r in 0..dim - 1 {
        if a[r + 1][r].abs() > a[r][r].abs() {
            a.swap(r, r + 1);
            b.swap(r, r + 1);
        }
        let piv = a[r][r];
        if piv == T::zero() {
            return Ok(T::infinity());
        }
        let m = a[r + 1][r] / piv;
        if m != T::zero() {
            for j in r..dim {
                let v = a[r][j];
                a[r + 1][j] = a[r + 1][j] - m * v;
            }
            b[r + 1] = b[r + 1] - m * b[r];
        }
    }
    let mut h = vec![T::zero(); dim];
    for r in (0..dim).rev() {
        let mut acc = b[r];
        for j in r + 1..dim {
            acc = acc - a[r][j] * h[j];
        }
        if a[r][r] == T::zero() {
            return Ok(T::infinity());
        }
        h[r] = acc / a[r][r];
    }
    if h.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Ok(T::infinity());
    }
    let mut f = T::one();
    let mut pw = T::one();
    for v in &h {
        pw = pw * lambda;
        f = f + pw * *v;
    }
    Ok(c(1) * f)
}

/// Pressure `u₀(t)` of the Fibonacci system: the root of `F(u) = 1`.
pub fn fib_pressure<T: Real>(lambda: T, t: T) -> Result<PressureSolveResult<T>> {
    if !(t > T::zero() && t <= T::one()) {
        return Err(Error::config(format!("t = {t} outside (0, 1]")));
    }
    let f = |u: T| fib_generating_function(lambda, t, u).map(|v| v - T::one());
    let at0 = f(T::zero())?;
    if at0.is_finite() && at0 <= T::lit(BOUNDARY_TOL) {
        return Ok(PressureSolveResult {
            kind: SolveKind::Root,
            u0: T::zero(),
            induced_pressure_at_u0: at0.ln_1p(),
            bracket: (T::zero(), T::zero()),
            residual: at0,
            evaluations: 1,
            boundary: at0.abs() < T::lit(BOUNDARY_TOL),
        });
    }
    let mut hi = T::lit(1e-3);
    let mut evals = 1;
    while f(hi)? > T::zero() {
        hi = hi * T::lit(4.0);
        evals += 1;
        if hi > T::lit(1e3) {
            return Err(Error::numerical("no upper bracket for the Fibonacci pressure"));
        }
    }
    let mut lo = hi;
    loop {
        lo = lo * T::lit(0.0625);
        evals += 1;
        if lo < T::lit(1e-30) {
            lo = T::zero();
            break;
        }
        if f(lo)? > T::zero() {
            break;
        }
    }
    let out = bisect_secant(f, lo, hi, T::lit(1e-6), T::lit(ROOT_FTOL))?;
    Ok(PressureSolveResult {
        kind: SolveKind::Root,
        u0: out.root,
        induced_pressure_at_u0: out.residual.ln_1p(),
        bracket: out.bracket,
        residual: out.residual,
        evaluations: evals + out.evaluations,
        boundary: false,
    })
}

/// `λ(u, s)` on a grid with `∂λ/∂u` by Richardson-extrapolated central
/// differences (`h = u/100`).
#[derive(Clone, Debug, Serialize)]
pub struct EigenCurve<T> {
    pub points: Vec<(T, T)>,
    pub lambda: Vec<T>,
    pub dlambda_du: Vec<T>,
}

/// For a full-branch locally constant model the leading eigenvalue is the
/// partition function itself.
pub fn eigen_curve<T: Real>(model: &InducedModel<T>, points: &[(T, T)]) -> Result<EigenCurve<T>> {
    let rows: Vec<Result<(T, T)>> = points
        .par_iter()
        .map(|&(u, s)| {
            let lam = T::one() + model.excess(u, s)?;
            let d = |h: T| -> Result<T> {
                Ok((model.excess(u + h, s)? - model.excess(u - h, s)?) / (h + h))
            };
            let h = u.abs() / T::lit(100.0);
            if h == T::zero() {
                return Err(Error::config("derivative grid needs u ≠ 0"));
            }
            let (d1, d2) = (d(h)?, d(h * T::lit(0.5))?);
            Ok((lam, (T::lit(4.0) * d2 - d1) / T::lit(3.0)))
        })
        .collect();
    let mut lambda = Vec::with_capacity(points.len());
    let mut dlambda_du = Vec::with_capacity(points.len());
    for r in rows {
        let (l, d) = r?;
        lambda.push(l);
        dlambda_du.push(d);
    }
    Ok(EigenCurve { points: points.to_vec(), lambda, dlambda_du })
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenAsymptotics<T> {
    /// Two-term fit `1 − λ(u) ≈ A·u^b + B·u`.
    pub two_term: TwoTermFit<T>,
    /// Plain log-log fit of `1 − λ(u)`.
    pub plain: FitReport<T>,
    /// Log-log fit of `|1 − λ(u) − cΓ(1−β)u^β − c_H·u|`.
    pub residual: FitReport<T>,
    pub expected_exponent: T,
    pub expected_constant: T,
    pub c_h: T,
    pub u: Vec<T>,
    pub one_minus_lambda: Vec<T>,
}

/// Exponent and constant of `1 − λ(u, 0)` and the slope of what remains once
/// the two predicted leading terms are removed.
pub fn eigen_asymptotics_fit<T: Real>(model: &InducedModel<T>, u_grid: &[T]) -> Result<EigenAsymptotics<T>> {
    let law = model
        .tail_law()
        .ok_or_else(|| Error::config("eigenvalue asymptotics need an analytic tail law"))?;
    if u_grid.iter().any(|&u| !(u > T::zero() && u <= T::lit(0.1))) {
        return Err(Error::config("u grid must lie in (0, 0.1]"));
    }
    let lo = u_grid.iter().copied().fold(T::infinity(), T::min);
    let hi = u_grid.iter().copied().fold(T::zero(), T::max);
    if hi < T::lit(100.0) * lo * (T::one() - T::lit(1e-9)) {
        return Err(Error::config("u grid must span at least two decades"));
    }
    let values: Vec<T> = u_grid
        .par_iter()
        .map(|&u| model.excess(u, T::zero()).map(|e| -e))
        .collect::<Result<_>>()?;
    let two_term = two_term_fit(u_grid, &values)?;
    let plain = power_law_fit(u_grid, &values)?;
    let c_h = ch_constant(law)?;
    let expected_constant = law.c * gamma(T::one() - law.beta);
    let res: Vec<T> = u_grid
        .iter()
        .zip(&values)
        .map(|(&u, &v)| v - expected_constant * u.powf(law.beta) - c_h * u)
        .collect();
    let residual = power_law_fit(u_grid, &res)?;
    Ok(EigenAsymptotics {
        two_term,
        plain,
        residual,
        expected_exponent: law.beta,
        expected_constant,
        c_h,
        u: u_grid.to_vec(),
        one_minus_lambda: values,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationPoint<T> {
    pub s: T,
    pub u0: T,
    /// `P̄(s) = log F(0, s)`.
    pub p_bar: T,
    /// `u₀^β / P̄`, the pointwise estimate of `C`.
    pub c_estimate: T,
    /// `u₀/(C·P̄)^{1/β} − 1` with `C = derived_constant`.
    pub q: T,
    /// Leading-order prediction `−(c_H/β)C^{1/β}P̄^{(1−β)/β}`.
    pub q_predicted: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport<T> {
    /// Regression of `log u₀` on `log P̄`: `exponent` is the slope and
    /// `constant` the estimate of `C` (pointwise estimates extrapolated to
    /// `P̄ → 0` along `P̄^{(1−β)/β}`).
    pub fit: FitReport<T>,
    pub intercept: T,
    pub expected_slope: T,
    /// `(cβΓ(1−β))^{−1}`, the constant as usually stated.
    pub expected_constant: T,
    /// `(cΓ(1−β))^{−1}`, the constant obtained by integrating
    /// `∂_u λ = −cβΓ(1−β)u^{β−1}` from 0 to `u₀`.
    pub derived_constant: T,
    pub points: Vec<RelationPoint<T>>,
    /// Grid values dropped because the solve was not a root or `P̄ ≤ 0`.
    pub excluded: Vec<T>,
    /// `min u₀(s)/s^{1/(β−ε)}` over the grid, with `ε` below.
    pub lower_bound_constant: T,
    pub lower_bound_epsilon: T,
    /// Whether `u₀(s)/s^{1/(β−ε)}` is no smaller at the smallest `s` than at
    /// the largest, i.e. the bound does not degrade as `s → 0`.
    pub lower_bound_holds: bool,
}

/// Tests `u₀(s) = (C·P̄(s))^{1/β}(1 + Q(s))`. Both the stated constant
/// `(cβΓ(1−β))^{−1}` and the integrated one `(cΓ(1−β))^{−1}` are reported.
pub fn pressure_relation_fit<T: Real>(
    model: &InducedModel<T>,
    potential: &PotentialFamily<T>,
    s_grid: &[T],
) -> Result<RelationReport<T>> {
    let law = model
        .tail_law()
        .ok_or_else(|| Error::config("the pressure relation needs an analytic tail law"))?
        .clone();
    let beta = law.beta;
    let m = model.with_potential(potential.clone())?;
    let derived_constant = (law.c * gamma(T::one() - beta)).recip();
    let expected_constant = derived_constant / beta;
    let c_h = ch_constant(&law)?;
    let rows: Vec<Result<Option<(T, T)>>> = s_grid
        .par_iter()
        .map(|&s| {
            let sol = solve_u0(&m, s)?;
            if sol.kind != SolveKind::Root || !(sol.u0 > T::zero()) {
                return Ok(None);
            }
            let p = series_pressure(&m, T::zero(), s)?;
            Ok(if p > T::zero() { Some((sol.u0, p)) } else { None })
        })
        .collect();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let inv_beta = beta.recip();
    let eps = T::lit(0.05);
    for (&s, r) in s_grid.iter().zip(rows) {
        match r? {
            Some((u0, p)) => {
                let q = u0 / (derived_constant * p).powf(inv_beta) - T::one();
                let q_predicted = -(c_h / beta)
                    * derived_constant.powf(inv_beta)
                    * p.powf((T::one() - beta) / beta);
                points.push(RelationPoint { s, u0, p_bar: p, c_estimate: u0.powf(beta) / p, q, q_predicted });
            }
            None => excluded.push(s),
        }
    }
    if points.len() < 3 {
        return Err(Error::numerical("fewer than three usable grid points"));
    }
    let px: Vec<T> = points.iter().map(|p| p.p_bar).collect();
    let uy: Vec<T> = points.iter().map(|p| p.u0).collect();
    let mut fit = power_law_fit(&px, &uy)?;
    let intercept = fit.constant.ln();
    // C from the pointwise ratios, extrapolated along the first correction
    let xs: Vec<T> = px.iter().map(|p| p.powf((T::one() - beta) / beta)).collect();
    let cs: Vec<T> = points.iter().map(|p| p.c_estimate).collect();
    let lf = linear_fit(&xs, &cs)?;
    fit.constant = lf.intercept;
    fit.stderr_constant = lf.stderr_intercept;
    let ratio = |p: &RelationPoint<T>| p.u0 / p.s.powf((beta - eps).recip());
    let lower_bound_constant = points.iter().map(ratio).fold(T::infinity(), T::min);
    let smallest = points.iter().min_by(|a, b| a.s.partial_cmp(&b.s).unwrap()).map(ratio);
    let largest = points.iter().max_by(|a, b| a.s.partial_cmp(&b.s).unwrap()).map(ratio);
    let lower_bound_holds = match (smallest, largest) {
        (Some(a), Some(b)) => a >= b && lower_bound_constant > T::zero(),
        _ => false,
    };
    Ok(RelationReport {
        fit,
        intercept,
        expected_slope: inv_beta,
        expected_constant,
        derived_constant,
        points,
        excluded,
        lower_bound_constant,
        lower_bound_epsilon: eps,
        lower_bound_holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct PiReport<T> {
    /// Log-log fit of `|Π(s)|`.
    pub fit: FitReport<T>,
    pub s: Vec<T>,
    pub values: Vec<T>,
    pub sign: Sign,
}

/// `Π(s) = Σ N(n)e^{w(n)}(e^{sψ̄(n)} − 1)` on a grid.
pub fn pi_s<T: Real>(
    model: &InducedModel<T>,
    potential: &PotentialFamily<T>,
    s_grid: &[T],
) -> Result<PiReport<T>> {
    if s_grid.iter().any(|&s| !(s > T::zero() && s <= T::lit(0.1))) {
        return Err(Error::config("s grid must lie in (0, 0.1]"));
    }
    let m = model.with_potential(potential.clone())?;
    let base = m.excess(T::zero(), T::zero())?;
    let values: Vec<T> = s_grid
        .par_iter()
        .map(|&s| m.excess(T::zero(), s).map(|e| e - base))
        .collect::<Result<_>>()?;
    let pos = values.iter().all(|v| *v > T::zero());
    let neg = values.iter().all(|v| *v < T::zero());
    let sign = if pos {
        Sign::Positive
    } else if neg {
        Sign::Negative
    } else {
        Sign::Mixed
    };
    let fit = power_law_fit(s_grid, &values)?;
    Ok(PiReport { fit, s: s_grid.to_vec(), values, sign })
}
