//! Pomeau-Manneville and flat-critical-point families.

use serde_json::json;

use plab_core::maps::{flat_induced_model, pm_backward_orbit, pm_cylinders, pm_induced_model};
use plab_core::numerics::{geometric_grid, power_law_fit};

use super::{list_or, require};
use crate::config::Params;
use crate::report::{Check, CsvTable, Report};
use crate::RunError;

fn window(p: &Params, lo: u64, hi: u64, n_max: u64) -> Result<Vec<u64>, RunError> {
    let lo = p.fit_lo.unwrap_or(lo);
    let hi = p.fit_hi.unwrap_or(hi).min(n_max);
    require(lo >= 1 && hi >= 10 * lo, || format!("fit window [{lo}, {hi}] spans less than a decade"))?;
    let mut ns: Vec<u64> = geometric_grid(lo as f64, hi as f64, 25).into_iter().map(|x| x.round() as u64).collect();
    ns.dedup();
    Ok(ns)
}

pub fn pm_model(p: &Params) -> Result<Report, RunError> {
    let alpha = p.alpha.unwrap_or(2.0);
    let b = p.b.unwrap_or(1.0);
    let t = list_or(&p.t, &[1.0])?[0];
    let n_max = p.n_max.unwrap_or(5_000);
    require(alpha > 1.0, || format!("α = {alpha} must exceed 1"))?;
    require(b > 0.0 && b <= 1.0, || format!("b = {b} outside (0, 1]"))?;
    require((64..=50_000).contains(&n_max), || format!("n_max = {n_max} outside [64, 50000]"))?;
    let ns = window(p, 100, 2_000, n_max)?;
    let mut report = Report::new("pm-model", json!({ "alpha": alpha, "b": b, "t": t, "n_max": n_max }));
    let model = pm_induced_model(alpha, b, t, n_max)?;
    let mass = model.partition(0.0, 0.0)?;
    let normalized = model.normalize()?;
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let tails: Vec<f64> = ns.iter().map(|&n| normalized.tail(n)).collect();
    let fit = power_law_fit(&xs, &tails)?;
    let beta = alpha.recip();
    report.check(Check::absolute("tail exponent", -fit.exponent, beta, 0.02).criterion(13));
    if t == 1.0 {
        let renorm = normalized.partition(0.0, 0.0)?;
        report.check(Check::absolute("normalized mass", renorm, 1.0, 1e-6));
        let et = normalized.expected_tau(0.0, 0.0)?;
        report.check(Check::flag("E(τ) infinite", et.is_infinite()));
    }
    // left-branch inverse against the forward map
    let orbit = pm_backward_orbit(alpha, 2_000)?;
    let round_trip = orbit
        .windows(2)
        .map(|w| (w[1] * (1.0 + (2.0 * w[1]).powf(alpha)) - w[0]).abs())
        .fold(0.0, f64::max);
    report.check(Check::at_most("inverse-branch round trip", round_trip, 1e-12).diagnostic());
    let cylinders = pm_cylinders(alpha, b, t, n_max)?;
    let covered = cylinders.total_length();
    let mut table = CsvTable::new("cylinders", &["n", "left", "right", "weight"]);
    for c in &cylinders.rows {
        table.push(vec![c.n.into(), c.left.into(), c.right.into(), c.weight.into()]);
    }
    let mut tail_table = CsvTable::new("tails", &["n", "tail"]);
    for (&n, &v) in ns.iter().zip(&tails) {
        tail_table.push(vec![n.into(), v.into()]);
    }
    report.results = json!({
        "fit": fit,
        "expected_exponent": beta,
        "conformal_mass": mass,
        "covered_length": covered,
        "uncovered_length": 0.5 - covered,
        "markov": b == 1.0,
    });
    report.tables.push(table);
    report.tables.push(tail_table);
    Ok(report)
}

pub fn flat_model(p: &Params) -> Result<Report, RunError> {
    let alpha = p.alpha.unwrap_or(2.0);
    let b = p.b.unwrap_or(1.0);
    let n_max = p.n_max.unwrap_or(10_000);
    require(alpha > 0.0 && b > 0.0, || "flat map needs α > 0 and b > 0".into())?;
    require(2.0 * alpha * b > 1.0, || "the fixed point −1 must repel: need 2αb > 1".into())?;
    require((64..=10_000_000).contains(&n_max), || format!("n_max = {n_max} outside [64, 1e7]"))?;
    let ns = window(p, 100, n_max, n_max)?;
    let mut report = Report::new("flat-model", json!({ "alpha": alpha, "b": b, "n_max": n_max }));
    let fm = flat_induced_model(alpha, b, n_max)?;
    let beta = alpha.recip();
    let scale = ((2.0 * alpha * b).ln() / b).powf(beta);
    let at = |n: u64| fm.a[n as usize] * (n as f64).powf(beta) * scale;
    let ratio = at(n_max);
    report.check(Check::absolute("a_n n^β (log|f'(1)|/b)^β at n_max", ratio, 1.0, 0.02).criterion(13));
    // ζ_n settles geometrically
    let d: Vec<f64> = fm.ln_zeta.windows(2).skip(2).map(|w| (w[1] - w[0]).abs()).collect();
    let contraction = d
        .windows(2)
        .take(40)
        .filter(|w| w[0] > 1e-300 && w[1] > 0.0)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    report.check(Check::at_most("ζ_n difference ratio", contraction, 0.999).diagnostic());
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let tails: Vec<f64> = ns.iter().map(|&n| fm.a[n as usize] / fm.fixed_point).collect();
    let fit = power_law_fit(&xs, &tails)?;
    report.check(Check::absolute("tail exponent", -fit.exponent, beta, 0.02).diagnostic());
    let mut table = CsvTable::new("a_n", &["n", "a_n", "scaled", "ln_zeta"]);
    for n in 1..=n_max {
        table.push(vec![n.into(), fm.a[n as usize].into(), at(n).into(), fm.ln_zeta[n as usize].into()]);
    }
    report.results = json!({
        "fixed_point": fm.fixed_point,
        "r": fm.r,
        "scaled_a_n_at_n_max": ratio,
        "zeta_limit": fm.ln_zeta.last().map(|z| z.exp()),
        "zeta_contraction": contraction,
        "fit": fit,
    });
    report.tables.push(table);
    Ok(report)
}
