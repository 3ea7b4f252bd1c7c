//! Stratmann-Vogt and Fibonacci experiments.

use rayon::prelude::*;
use serde_json::json;

use plab_core::combinatorics::{
    beta_of_lambda, catalan, count_first_returns, count_first_returns_exhaustive, fib_walk_dp, sv_model,
};
use plab_core::numerics::{geometric_grid, linear_fit, power_law_fit, NeumaierSum};
use plab_core::pressure::{fib_pressure as solve_fib, matrix_pressure, solve_u0, sv_closed_form, SolveKind};

use super::{grid_or, list_or, require};
use crate::config::{Method, Params};
use crate::report::{Cell, Check, CsvTable, Report};
use crate::RunError;

/// Integer grid of about `count` geometric points in `[lo, hi]`.
fn int_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = geometric_grid(lo as f64, hi as f64, count)
        .into_iter()
        .map(|x| x.round() as u64)
        .collect();
    out.dedup();
    out
}

pub fn catalan_check(p: &Params) -> Result<Report, RunError> {
    let n_max = p.n_max.unwrap_or(14);
    require((1..=10_000).contains(&n_max), || format!("n_max = {n_max} outside [1, 10000]"))?;
    let exhaustive_max = n_max.min(16);
    let mut report = Report::new("catalan-check", json!({ "n_max": n_max, "exhaustive_max": exhaustive_max }));
    let mut table = CsvTable::new("counts", &["n", "dp", "exhaustive", "catalan_n_minus_1"]);
    let mut dp_ok = true;
    let mut ex_ok = true;
    for n in 1..=n_max {
        let dp = count_first_returns(n);
        let cat = catalan(n - 1);
        dp_ok &= dp == cat;
        let ex = if n <= exhaustive_max {
            let e = count_first_returns_exhaustive(n)?;
            ex_ok &= cat == e.into();
            e.to_string()
        } else {
            String::new()
        };
        table.push(vec![n.into(), dp.to_string().into(), ex.into(), cat.to_string().into()]);
    }
    report.check(Check::flag("dp counts equal catalan(n-1)", dp_ok).criterion(1));
    report.check(Check::flag("exhaustive counts equal catalan(n-1)", ex_ok).criterion(1));
    report.results = json!({ "all_equal": dp_ok && ex_ok });
    report.tables.push(table);
    Ok(report)
}

/// `binom(2n, n)/4^n` by the product `Π (1 − 1/(2k))`, summed in log space.
fn central_binomial_tail(n: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for k in 1..=n {
        acc.add((-0.5 / k as f64).ln_1p());
    }
    acc.value().exp()
}

pub fn sv_tails(p: &Params) -> Result<Report, RunError> {
    let lambda = list_or(&p.lambda, &[0.5])?[0];
    let t = list_or(&p.t, &[1.0])?[0];
    let critical = lambda == 0.5 && t == 1.0;
    let (lo_d, hi_d) = if critical { (1_000, 1_000_000) } else { (100, 1_000) };
    let fit_lo = p.fit_lo.unwrap_or(lo_d);
    let fit_hi = p.fit_hi.unwrap_or(hi_d);
    let n_max = p.n_max.unwrap_or(fit_hi.max(2 * fit_lo));
    require(fit_lo >= 1 && fit_hi > fit_lo, || format!("bad fit window [{fit_lo}, {fit_hi}]"))?;
    require(n_max >= 10 && n_max <= 5_000_000, || format!("n_max = {n_max} outside [10, 5e6]"))?;
    let model = sv_model(lambda, t, n_max)?;
    let mut report = Report::new(
        "sv-tails",
        json!({ "lambda": lambda, "t": t, "n_max": n_max, "fit_window": [fit_lo, fit_hi] }),
    );
    let ns = int_grid(fit_lo, fit_hi, 25);
    let tails: Vec<f64> = ns.iter().map(|&n| model.tail(n)).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mut table = CsvTable::new("tails", &["n", "tail", "n_beta_tail"]);
    for (&n, &v) in ns.iter().zip(&tails) {
        table.push(vec![n.into(), v.into(), ((n as f64).sqrt() * v).into()]);
    }
    if critical {
        let fit = power_law_fit(&xs, &tails)?;
        let constant = (fit_hi as f64).sqrt() * model.tail(fit_hi);
        let target = 1.0 / std::f64::consts::PI.sqrt();
        // independent closed form binom(2n,n)/4^n on a few grid points
        let sample: Vec<u64> = ns.iter().copied().step_by(6).collect();
        let worst = sample
            .par_iter()
            .map(|&n| (model.tail(n) / central_binomial_tail(n) - 1.0).abs())
            .reduce(|| 0.0, f64::max);
        report.check(Check::absolute("tail exponent", -fit.exponent, 0.5, 0.005).criterion(2));
        report.check(Check::relative("n^1/2 tail at window end", constant, target, 0.02).criterion(2));
        report.check(Check::at_most("max relative deviation from binom(2n,n)/4^n", worst, 1e-8).criterion(2));
        report.results = json!({ "fit": fit, "constant": constant, "expected_constant": target, "oracle_deviation": worst });
    } else {
        let ln_t: Vec<f64> = tails.iter().map(|v| v.ln()).collect();
        let lf = linear_fit(&xs, &ln_t)?;
        let expected = (4.0 * lambda * (1.0 - lambda)).powf(t).ln() + 4f64.ln() * (1.0 - t);
        report.check(
            Check::absolute("log-tail slope per step", lf.slope, expected, 0.1 * expected.abs().max(1e-3))
                .diagnostic()
                .note("includes the n^{-3/2} prefactor drift over the window"),
        );
        report.results = json!({ "log_slope": lf.slope, "expected_log_slope": expected });
    }
    report.tables.push(table);
    Ok(report)
}

pub fn sv_pressure(p: &Params) -> Result<Report, RunError> {
    match p.method.unwrap_or(Method::Abscissa) {
        Method::Abscissa => sv_pressure_series(p),
        Method::Matrix => sv_pressure_matrix(p),
    }
}

fn sv_pressure_series(p: &Params) -> Result<Report, RunError> {
    let lambda = list_or(&p.lambda, &[0.5])?[0];
    let ts = list_or(&p.t, &[0.5, 0.9, 0.99])?;
    let n_max = p.n_max.unwrap_or(20_000);
    require(n_max >= 64, || format!("n_max = {n_max} below 64"))?;
    require(ts.iter().all(|&t| t > 0.0), || "t must be positive".into())?;
    let mut report = Report::new(
        "sv-pressure",
        json!({ "method": "abscissa", "lambda": lambda, "t": ts, "n_max": n_max }),
    );
    let rows: Vec<_> = ts
        .par_iter()
        .map(|&t| -> Result<_, RunError> {
            let model = sv_model(lambda, t, n_max)?;
            Ok((t, solve_u0(&model, 0.0)?))
        })
        .collect::<Result<_, _>>()?;
    let mut table = CsvTable::new("pressure", &["t", "kind", "u0", "expected", "error"]);
    let mut out = Vec::new();
    for (t, sol) in rows {
        let expected = if lambda == 0.5 { Some((1.0 - t).max(0.0) * 4f64.ln()) } else { None };
        let kind = format!("{:?}", sol.kind);
        if let Some(e) = expected {
            if t < 1.0 {
                report.check(
                    Check::absolute(&format!("u0 at t = {t}"), sol.u0, e, 1e-6).criterion(3),
                );
                report.check(Check::flag(&format!("abscissa path at t = {t}"), sol.kind == SolveKind::Abscissa).criterion(3));
            } else {
                report.check(Check::absolute(&format!("u0 at t = {t}"), sol.u0, e, 1e-10));
            }
        }
        table.push(vec![
            t.into(),
            kind.as_str().into(),
            sol.u0.into(),
            expected.unwrap_or(f64::NAN).into(),
            expected.map(|e| sol.u0 - e).unwrap_or(f64::NAN).into(),
        ]);
        out.push(json!({ "t": t, "kind": kind, "u0": sol.u0, "expected": expected, "solve": sol }));
    }
    report.results = json!({ "points": out });
    report.tables.push(table);
    Ok(report)
}

fn sv_pressure_matrix(p: &Params) -> Result<Report, RunError> {
    let lambda = list_or(&p.lambda, &[0.4])?[0];
    let ts = list_or(&p.t, &[1.0, 1.1, 1.3])?;
    let n = p.truncation.unwrap_or(400);
    let u = p.u.unwrap_or(0.0);
    require(n >= 50, || format!("truncation N = {n} below 50"))?;
    let mut report = Report::new(
        "sv-pressure",
        json!({ "method": "matrix", "lambda": lambda, "t": ts, "truncation": n, "u": u }),
    );
    let rows: Vec<_> = ts
        .par_iter()
        .map(|&t| -> Result<_, RunError> {
            let a = matrix_pressure(lambda, t, u, n)?;
            let b = matrix_pressure(lambda, t, u, 2 * n)?;
            Ok((t, a, b))
        })
        .collect::<Result<_, _>>()?;
    let mut table = CsvTable::new("pressure", &["t", "matrix", "matrix_doubled", "closed_form", "error"]);
    let mut out = Vec::new();
    for (t, a, b) in rows {
        let applies = lambda.powf(t) <= 0.5;
        let closed = sv_closed_form(lambda, t) - u;
        if applies {
            report.check(Check::absolute(&format!("matrix vs closed form at t = {t}"), a, closed, 1e-6).criterion(4));
        }
        report.check(Check::at_most(&format!("doubling change at t = {t}"), (a - b).abs(), 1e-9).diagnostic());
        table.push(vec![t.into(), a.into(), b.into(), closed.into(), (a - closed).into()]);
        out.push(json!({ "t": t, "matrix": a, "matrix_doubled": b, "closed_form": closed, "closed_form_applies": applies }));
    }
    report.results = json!({ "points": out });
    report.tables.push(table);
    Ok(report)
}

fn fib_lambda_ok(lambda: f64) -> Result<(), RunError> {
    let lo = plab_core::combinatorics::lambda_lower::<f64>();
    require(lambda > lo && lambda < 0.5, || format!("λ = {lambda} outside (2/(3+√5), 1/2)"))
}

pub fn fib_tails(p: &Params) -> Result<Report, RunError> {
    let lambdas = list_or(&p.lambda, &[0.42, 0.45, 0.48])?;
    let fit_lo = p.fit_lo.unwrap_or(100);
    let fit_hi = p.fit_hi.unwrap_or(10_000);
    let n_max = p.n_max.unwrap_or(fit_hi);
    let t = list_or(&p.t, &[1.0])?[0];
    let u = p.u.unwrap_or(0.0);
    for &l in &lambdas {
        fib_lambda_ok(l)?;
    }
    require(fit_lo >= 1 && fit_hi > fit_lo && fit_hi <= n_max, || format!("bad window [{fit_lo}, {fit_hi}]"))?;
    require(n_max <= 100_000, || format!("n_max = {n_max} above 1e5"))?;
    let mut report = Report::new(
        "fib-tails",
        json!({ "lambda": lambdas, "t": t, "u": u, "n_max": n_max, "window": [fit_lo, fit_hi] }),
    );
    let walks: Vec<_> = lambdas
        .par_iter()
        .map(|&l| fib_walk_dp(l, t, u, n_max))
        .collect::<Result<_, _>>()?;
    let mut table = CsvTable::new("tails", &["lambda", "n", "tail", "n_beta_tail"]);
    let mut out = Vec::new();
    for w in &walks {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for n in fit_lo..=fit_hi {
            let v = (n as f64).powf(w.beta) * w.tail[n as usize];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let ratio = hi / lo;
        report.check(Check::at_most(&format!("band ratio at λ = {}", w.lambda), ratio, 4.0).criterion(5));
        if t == 1.0 && u == 0.0 {
            let mut returned = NeumaierSum::new();
            for v in &w.classes {
                returned.add(*v);
            }
            let defect = (returned.value() + w.tail[n_max as usize] - 1.0).abs();
            report.check(Check::at_most(&format!("mass conservation at λ = {}", w.lambda), defect, 1e-12).diagnostic());
        }
        for n in 1..=n_max as usize {
            table.push(vec![
                w.lambda.into(),
                n.into(),
                w.tail[n].into(),
                ((n as f64).powf(w.beta) * w.tail[n]).into(),
            ]);
        }
        out.push(json!({ "lambda": w.lambda, "beta": w.beta, "band": [lo, hi], "ratio": ratio, "levels": w.levels }));
    }
    report.results = json!({ "walks": out });
    report.tables.push(table);
    Ok(report)
}

pub fn fib_pressure(p: &Params) -> Result<Report, RunError> {
    let lambda = list_or(&p.lambda, &[0.45])?[0];
    fib_lambda_ok(lambda)?;
    let gaps = grid_or(&p.one_minus_t, 0.005, 0.1, 20)?;
    require(gaps.iter().all(|g| *g > 0.0 && *g < 1.0), || "1 − t must lie in (0, 1)".into())?;
    let beta = beta_of_lambda(lambda);
    let mut report = Report::new("fib-pressure", json!({ "lambda": lambda, "one_minus_t": gaps }));
    let solve = |gs: &[f64]| -> Result<Vec<f64>, RunError> {
        gs.par_iter()
            .map(|&g| solve_fib(lambda, 1.0 - g).map(|r| r.u0).map_err(RunError::from))
            .collect()
    };
    let u0 = solve(&gaps)?;
    require(u0.iter().all(|u| *u > 0.0), || "pressure vanished on the grid".into())?;
    let fit = power_law_fit(&gaps, &u0)?;
    report.check(Check::relative("slope of log u0 vs log(1-t)", fit.exponent, 1.0 / beta, 0.05).criterion(6));
    // the same fit much closer to t = 1
    let near = geometric_grid(1e-5, 1e-4, 8);
    let near_u0 = solve(&near)?;
    let near_fit = power_law_fit(&near, &near_u0)?;
    report.check(
        Check::relative("slope on 1-t in [1e-5, 1e-4]", near_fit.exponent, 1.0 / beta, 0.05).diagnostic(),
    );
    let mut table = CsvTable::new("pressure", &["one_minus_t", "u0"]);
    for (g, u) in gaps.iter().zip(&u0).chain(near.iter().zip(&near_u0)) {
        table.push(vec![Cell::Float(*g), Cell::Float(*u)]);
    }
    report.results = json!({ "beta": beta, "expected_slope": 1.0 / beta, "fit": fit, "near_one_fit": near_fit });
    report.tables.push(table);
    Ok(report)
}
