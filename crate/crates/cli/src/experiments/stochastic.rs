//! Renewal sequences, correlations and the last-visit law.

use serde_json::json;

use plab_core::maps::{IntervalMapDescriptor, MapFamily};
use plab_core::pressure::{solve_u0, SolveKind};
use plab_core::renewal::{
    arcsine_cdf, correlation as corr, ks_distance, ks_two_sample, model_renewal, renewal_sequence,
    renewal_sequence_fft, simulate_last_visit, simulate_last_visit_at, SimulationMode,
};
use plab_core::{combinatorics, numerics::geometric_grid};

use super::{beta_check, list_or, potential, psi_label, require, scalar_model};
use crate::config::{Mode, ModelKind, Params, PsiKind};
use crate::report::{Check, CsvTable, Report};
use crate::RunError;

/// Drift schedule `s_n = n^{−(1−β)/(β−0.1)−0.05}`.
pub fn drift_schedule(beta: f64, n: u64) -> f64 {
    (n as f64).powf(-(1.0 - beta) / (beta - 0.1) - 0.05)
}

pub fn renewal(p: &Params) -> Result<Report, RunError> {
    let beta = list_or(&p.beta, &[0.75])?[0];
    let n = p.n.unwrap_or(100_000);
    let lo = p.fit_lo.unwrap_or(n / 2);
    let n_max = p.n_max.unwrap_or(10_000);
    let kind = p.model.unwrap_or(ModelKind::Gw);
    beta_check(beta)?;
    require(beta > 0.1, || "the drift schedule needs β > 0.1".into())?;
    require((1_000..=10_000_000).contains(&n), || format!("horizon n = {n} outside [1e3, 1e7]"))?;
    require(lo >= 1 && lo < n, || format!("window start {lo} must lie below n = {n}"))?;
    require(kind != ModelKind::Sv || beta == 0.5, || "the Stratmann-Vogt model has β = 1/2".into())?;
    let gamma = list_or(&p.gamma, &[0.5])?[0];
    let pot = potential(p, PsiKind::Poly, gamma, 4.0)?;
    let mut report = Report::new(
        "renewal",
        json!({ "beta": beta, "n": n, "window": [lo, n], "model": kind, "n_max": n_max, "psi": psi_label(&pot) }),
    );
    let model = scalar_model(kind, beta, 0.5, n_max)?;
    let seq0 = model_renewal(&model, 0.0, 0.0, n as usize)?;
    let scaled = |u: &[f64], k: u64| (k as f64).powf(1.0 - beta) * u[k as usize];
    let (mut mn, mut mx) = (f64::INFINITY, 0.0f64);
    for k in lo..=n {
        let v = scaled(&seq0.u, k);
        mn = mn.min(v);
        mx = mx.max(v);
    }
    let variation = mx / mn - 1.0;
    report.check(Check::at_most("variation of n^(1−β) u_n over the window", variation, 0.03).criterion(9));

    // joint limit along the drift schedule
    let s_n = drift_schedule(beta, n);
    let m = model.with_potential(pot.clone())?;
    let sol = solve_u0(&m, s_n)?;
    if sol.kind != SolveKind::Root {
        return Err(RunError::numerical(format!("s_n = {s_n:e} is transient for {}", psi_label(&pot))));
    }
    let seq_s = model_renewal(&m, sol.u0, s_n, n as usize)?;
    let ratio = seq_s.u[n as usize] / seq0.u[n as usize];
    report.check(
        Check::absolute("drifted / undrifted n^(1−β) u_n at n", ratio, 1.0, 0.05)
            .criterion(9)
            .note(format!("s_n = {s_n:e}, n·u0(s_n) = {:e}", n as f64 * sol.u0)),
    );

    // geometric law: u_n → 1/E(τ) = 1/2
    let mut q = vec![0.0; 1001];
    for k in 1..=1000 {
        q[k] = 0.5f64.powi(k as i32);
    }
    let geo = renewal_sequence(&q, 1000)?;
    report.check(Check::absolute("geometric law u_1000", geo.u[1000], 0.5, 1e-8).criterion(9));

    // fast path against direct convolution
    let (ql, _) = model.return_law(0.0, 0.0, 4096)?;
    let direct = renewal_sequence(&ql, 4096)?;
    let fast = renewal_sequence_fft(&ql, 4096)?;
    let gap = direct.u.iter().zip(&fast.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.check(Check::at_most("FFT vs direct convolution", gap, 1e-10).diagnostic());
    report.check(Check::at_most("recursion defect", direct.recursion_defect(), 1e-12).diagnostic());

    let mut idx: Vec<u64> = geometric_grid(1.0, n as f64, 400).into_iter().map(|x| x.round() as u64).collect();
    idx.dedup();
    let mut table = CsvTable::new("curve", &["n", "u_n", "n_pow_scaled", "u_n_drift", "n_pow_scaled_drift"]);
    for &k in &idx {
        table.push(vec![
            k.into(),
            seq0.u[k as usize].into(),
            scaled(&seq0.u, k).into(),
            seq_s.u[k as usize].into(),
            scaled(&seq_s.u, k).into(),
        ]);
    }
    report.results = json!({
        "limit_estimate": scaled(&seq0.u, n),
        "variation": variation,
        "drift": { "s_n": s_n, "u0": sol.u0, "n_u0": n as f64 * sol.u0, "ratio": ratio },
        "geometric_u_1000": geo.u[1000],
        "tail_mass": seq0.tail_mass,
    });
    report.tables.push(table);
    Ok(report)
}

/// Class values `x(1), x(2), …` stretched to `len` entries, last value
/// repeated; index 0 is unused.
fn class_values(x: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = x[(k - 1).min(x.len() - 1)];
    }
    out
}

pub fn correlation(p: &Params) -> Result<Report, RunError> {
    let beta = list_or(&p.beta, &[0.75])?[0];
    let s = p.s.unwrap_or(0.0);
    let n = p.n.unwrap_or(1_000);
    let n_max = p.n_max.unwrap_or(10_000);
    let kind = p.model.unwrap_or(ModelKind::Gw);
    let v = list_or(&p.v, &[1.0])?;
    let w = list_or(&p.w, &[1.0])?;
    beta_check(beta)?;
    require(s >= 0.0, || format!("s = {s} must be nonnegative"))?;
    require((1..=10_000_000).contains(&n), || format!("n = {n} outside [1, 1e7]"))?;
    let gamma = list_or(&p.gamma, &[0.5])?[0];
    let pot = potential(p, PsiKind::Poly, gamma, 4.0)?;
    let mut report = Report::new(
        "correlation",
        json!({ "beta": beta, "s": s, "n": n, "model": kind, "psi": psi_label(&pot), "v": v, "w": w }),
    );
    let model = scalar_model(kind, beta, 0.5, n_max)?.with_potential(pot.clone())?;
    let vv = class_values(&v, n as usize + 1);
    let ww = class_values(&w, n as usize + 1);
    let value = corr(&model, s, n as usize, &vv, &ww)?;
    let scaled = (n as f64).powf(1.0 - beta) * value;
    if v.iter().all(|x| *x == 1.0) && w.iter().all(|x| *x == 1.0) {
        let sol = solve_u0(&model, s)?;
        let u = model_renewal(&model, sol.u0, s, n as usize)?;
        report.check(Check::absolute("indicator reduction to u_n", value, u.u[n as usize], 1e-12));
    }
    report.results = json!({ "value": value, "n_pow_scaled": scaled });
    Ok(report)
}

pub fn arcsine(p: &Params) -> Result<Report, RunError> {
    let kind = p.model.unwrap_or(ModelKind::Sv);
    let beta = match kind {
        ModelKind::Sv => {
            let b = list_or(&p.beta, &[0.5])?[0];
            require(b == 0.5, || "the Stratmann-Vogt model has β = 1/2".into())?;
            b
        }
        _ => list_or(&p.beta, &[0.5])?[0],
    };
    beta_check(beta)?;
    let lambda = list_or(&p.lambda, &[0.5])?[0];
    require(kind != ModelKind::Sv || lambda == 0.5, || "the null-recurrent Stratmann-Vogt model needs λ = 1/2".into())?;
    let n = p.n.unwrap_or(10_000);
    let trials = p.trials.unwrap_or(100_000);
    let seed = p.seed.unwrap_or(1);
    let n_max = p.n_max.unwrap_or(n.max(10));
    let mode = match p.mode.unwrap_or(Mode::Skeleton) {
        Mode::Skeleton => SimulationMode::Skeleton,
        Mode::Orbit => SimulationMode::Orbit,
    };
    require(trials >= 1_000, || format!("trials = {trials} below 1000"))?;
    require(n >= 1, || "horizon must be positive".into())?;
    let map = match (mode, kind) {
        (SimulationMode::Orbit, ModelKind::Gw) => Some(IntervalMapDescriptor::new(MapFamily::GaspardWang { beta })?),
        (SimulationMode::Orbit, _) => return Err(RunError::config("orbit mode is available for the gw model only")),
        _ => None,
    };
    let mut report = Report::new(
        "arcsine",
        json!({ "model": kind, "beta": beta, "lambda": lambda, "n": n, "trials": trials, "seed": seed, "mode": mode, "n_max": n_max }),
    );
    let model = match kind {
        ModelKind::Sv => combinatorics::sv_model(lambda, 1.0, n_max)?,
        _ => scalar_model(kind, beta, lambda, n_max)?,
    };
    let sample = simulate_last_visit(&model, map.as_ref(), n, trials, seed, mode)?;
    let ks = ks_distance(&sample.values, |t| arcsine_cdf(beta, t).unwrap_or(f64::NAN))?;
    report.check(Check::at_most("KS distance to the arcsine law", ks, 0.01).criterion(10));
    let atom = sample.values.iter().filter(|v| **v == 0.0).count() as f64 / trials as f64;
    let mut drift = serde_json::Value::Null;
    if let Some(s) = p.s.filter(|s| *s > 0.0) {
        let gamma = list_or(&p.gamma, &[0.5])?[0];
        let pot = potential(p, PsiKind::Poly, gamma, 4.0)?;
        let m = model.with_potential(pot.clone())?;
        let sol = solve_u0(&m, s)?;
        if sol.kind != SolveKind::Root {
            return Err(RunError::numerical(format!("s = {s:e} is transient")));
        }
        let drifted = simulate_last_visit_at(&m, map.as_ref(), sol.u0, s, n, trials, seed ^ 0x9e37_79b9, mode)?;
        let two = ks_two_sample(&drifted.values, &sample.values)?;
        report.check(Check::at_most("KS distance drifted vs undrifted", two.statistic, 0.02));
        drift = json!({ "s": s, "u0": sol.u0, "psi": psi_label(&pot), "ks": two.statistic, "p_value": two.p_value });
    }
    let mut table = CsvTable::new("sample", &["z_over_n"]);
    for v in &sample.values {
        table.push(vec![(*v).into()]);
    }
    report.results = json!({
        "ks": ks,
        "atom_at_zero": atom,
        "tail_at_n": model.tail(n),
        "perturbations": sample.perturbations,
        "drift": drift,
    });
    report.tables.push(table);
    Ok(report)
}
