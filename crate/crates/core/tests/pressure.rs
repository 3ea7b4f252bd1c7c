mod common;

use plab_core::combinatorics::sv_model;
use plab_core::maps::{gaspard_wang_model, TailKind};
use plab_core::numerics::gamma;
use plab_core::pressure::{
    eigen_asymptotics_fit, eigen_curve, fib_generating_function, fib_pressure, matrix_pressure,
    pi_s, pressure_relation_fit, series_pressure, solve_u0, solve_u0_grid, sv_closed_form, Sign,
    SolveKind,
};
use plab_core::{Model, Potential};
use proptest::prelude::*;

fn gw(beta: f64, n_max: u64) -> Model {
    gaspard_wang_model(beta, TailKind::ExactPower, n_max).unwrap()
}

fn grid(lo: f64, decades: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * 10f64.powf(decades * k as f64 / (n - 1) as f64)).collect()
}

/// Masses `(2/3)^n`: `F(u) = r/(1−r)` with `r = (2/3)e^{−u}`.
fn geometric() -> Model {
    let masses: Vec<f64> = (1..=120).map(|n| (2.0f64 / 3.0).powi(n)).collect();
    Model::from_masses(&masses, None).unwrap()
}

#[test]
fn geometric_root() {
    let m = geometric();
    let sol = solve_u0(&m, 0.0).unwrap();
    assert_eq!(sol.kind, SolveKind::Root);
    assert!((sol.u0 - (4.0f64 / 3.0).ln()).abs() < 1e-12, "{}", sol.u0);
    assert!(sol.residual.abs() < 1e-13);
    let p = series_pressure(&m, 0.0, 0.0).unwrap();
    assert!((p - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn eigen_curve_matches_closed_form() {
    let m = geometric();
    let pts = [(0.05, 0.0), (0.1, 0.0), (0.4, 0.0)];
    let c = eigen_curve(&m, &pts).unwrap();
    for (k, &(u, _)) in pts.iter().enumerate() {
        let r = 2.0 / 3.0 * (-u).exp();
        assert!((c.lambda[k] - r / (1.0 - r)).abs() < 1e-12);
        let d = -r / ((1.0 - r) * (1.0 - r));
        assert!((c.dlambda_du[k] / d - 1.0).abs() < 1e-7, "{} vs {d}", c.dlambda_du[k]);
    }
    assert!(eigen_curve(&m, &[(0.0, 0.0)]).unwrap_err().is_config());
}

#[test]
fn sv_pressure_is_the_abscissa() {
    for t in [0.5, 0.9, 0.99] {
        let m = sv_model(0.5, t, 20_000).unwrap();
        let sol = solve_u0(&m, 0.0).unwrap();
        assert_eq!(sol.kind, SolveKind::Abscissa, "t = {t}");
        assert!((sol.u0 - (1.0 - t) * 4f64.ln()).abs() < 1e-6, "t = {t}: {}", sol.u0);
        assert!(sol.induced_pressure_at_u0 <= 0.0);
    }
    let sol = solve_u0(&sv_model(0.5f64, 1.0, 20_000).unwrap(), 0.0).unwrap();
    assert!(sol.u0.abs() < 1e-10);
}

#[test]
fn matrix_pressure_matches_closed_form() {
    for t in [1.0f64, 1.1, 1.3] {
        let a = matrix_pressure(0.4f64, t, 0.0, 400).unwrap();
        let b = matrix_pressure(0.4f64, t, 0.0, 800).unwrap();
        assert!((a - sv_closed_form(0.4, t)).abs() < 1e-10, "t = {t}");
        assert!((a - b).abs() < 1e-11);
        // the clock shift is exact
        let shifted = matrix_pressure(0.4f64, t, 0.3, 400).unwrap();
        assert!((shifted - (a - 0.3)).abs() < 1e-14);
    }
    assert!(matrix_pressure(0.4, 1.0, 0.0, 49).unwrap_err().is_config());
    assert!(matrix_pressure(0.6, 1.0, 0.0, 100).unwrap_err().is_config());
}

#[test]
fn fib_pressure_vanishes_at_one() {
    let f = fib_generating_function(0.45f64, 1.0, 0.0).unwrap();
    assert!((f - 1.0).abs() < 1e-8, "{f}");
    assert_eq!(fib_pressure(0.45, 1.0).unwrap().u0, 0.0);
    let mut last = 0.0;
    for t in [0.99, 0.9, 0.7, 0.5] {
        let sol = fib_pressure(0.45, t).unwrap();
        assert_eq!(sol.kind, SolveKind::Root);
        assert!(sol.u0 > last, "t = {t}");
        last = sol.u0;
    }
    assert!(fib_pressure(0.45, 1.2).unwrap_err().is_config());
    assert!(fib_generating_function(0.3, 1.0, 0.0).unwrap_err().is_config());
}

#[test]
fn root_agrees_with_extended_precision() {
    // ψ̄(n) = 4 − √n at β = ½; s = 0.1 is in the recurrent regime
    let m = gw(0.5, 20_000).with_potential(Potential::polynomial(4.0, 1.0, 0.5).unwrap()).unwrap();
    let s = 0.1;
    let sol = solve_u0(&m, s).unwrap();
    assert_eq!(sol.kind, SolveKind::Root);
    let mut o = common::Oracle::new();
    let (excess, slope) = o.sqrt_potential_partition(sol.u0, s, 4.0);
    let newton = excess / slope;
    assert!(newton.abs() < 1e-10 * sol.u0, "u0 = {}, step {newton:e}", sol.u0);
}

#[test]
fn small_drift_is_transient() {
    // sup ψ̄ = 4 > 0 but for small s the series stays below 1 at u = 0
    let m = gw(0.5, 20_000).with_potential(Potential::polynomial(4.0, 1.0, 0.5).unwrap()).unwrap();
    let sol = solve_u0(&m, 1e-3).unwrap();
    assert_eq!(sol.kind, SolveKind::Abscissa);
    assert_eq!(sol.u0, 0.0);
    assert!(sol.induced_pressure_at_u0 < 0.0);
    assert!(solve_u0(&m, -1.0).unwrap_err().is_config());
}

#[test]
fn eigenvalue_expansion() {
    for beta in [0.4, 0.5, 0.75] {
        let m = gw(beta, 20_000);
        let a = eigen_asymptotics_fit(&m, &grid(1e-5, 3.0, 13)).unwrap();
        assert!((a.two_term.exponent / beta - 1.0).abs() < 0.01, "β = {beta}: {:?}", a.two_term);
        assert!((a.two_term.constant / gamma(1.0 - beta) - 1.0).abs() < 0.02, "β = {beta}");
        assert!(a.residual.exponent >= (2.0 * beta).min(1.0) - 0.1, "β = {beta}: {:?}", a.residual);
        assert_eq!(a.expected_constant, gamma(1.0 - beta));
    }
    let m = gw(0.5, 1000);
    assert!(eigen_asymptotics_fit(&m, &grid(1e-3, 1.0, 5)).unwrap_err().is_config());
    assert!(eigen_asymptotics_fit(&m, &[1e-3, 0.5]).unwrap_err().is_config());
    assert!(eigen_asymptotics_fit(&geometric(), &grid(1e-5, 3.0, 5)).unwrap_err().is_config());
}

#[test]
fn deficit_leading_term_at_high_precision() {
    // 1 − λ(u) = √π·u^½ + ζ(½)u + O(u^{3/2}) for μ̄(τ > n) = (n+1)^{−½}
    let mut o = common::Oracle::new();
    let u = 1e-4;
    let d = o.exact_power_deficit(0.5, u);
    let lead = std::f64::consts::PI.sqrt() * u.sqrt() - 1.460_354_508_809_586_8 * u;
    assert!((d - lead).abs() < 2.0 * u.powf(1.5), "{d} vs {lead}");
}

#[test]
fn relation_slope_and_constants() {
    let m = gw(0.5, 20_000);
    let r = pressure_relation_fit(&m, &Potential::log(), &grid(1e-5, 3.0, 13)).unwrap();
    assert!(r.excluded.is_empty());
    assert!((r.fit.exponent - 2.0).abs() < 0.05, "{:?}", r.fit);
    let inv_gamma = 1.0 / std::f64::consts::PI.sqrt();
    assert!((r.derived_constant - inv_gamma).abs() < 1e-14);
    assert!((r.expected_constant - 2.0 * inv_gamma).abs() < 1e-14);
    assert!((r.fit.constant / r.derived_constant - 1.0).abs() < 0.01, "{}", r.fit.constant);
    assert!(r.lower_bound_holds);
    assert!(pressure_relation_fit(&geometric(), &Potential::log(), &[1e-3, 1e-2, 1e-1]).is_err());
}

#[test]
fn pi_scaling_for_linear_potential() {
    // ψ̄ = −n turns the drift into a clock shift: Π(s) = λ(s, 0) − 1
    for beta in [0.5, 0.75] {
        let m = gw(beta, 20_000);
        let s = grid(1e-5, 2.0, 9);
        let rep = pi_s(&m, &Potential::polynomial(0.0, 1.0, 1.0).unwrap(), &s).unwrap();
        assert_eq!(rep.sign, Sign::Negative);
        for (k, &x) in s.iter().enumerate() {
            let shift = m.excess(x, 0.0).unwrap();
            assert!((rep.values[k] - shift).abs() < 1e-13, "β = {beta}, s = {x}");
        }
        // leading order Γ(1−β)s^β; the ζ(β)s term pulls the fit below β
        assert!(rep.fit.exponent < beta + 0.005 && rep.fit.exponent > beta - 0.04, "β = {beta}: {:?}", rep.fit);
    }
    let m = gw(0.5, 1000);
    assert!(pi_s(&m, &Potential::log(), &[0.0, 0.01]).unwrap_err().is_config());
}

#[test]
fn grid_solve_keeps_order() {
    let m = gw(0.5, 5000).with_potential(Potential::polynomial(4.0, 1.0, 0.5).unwrap()).unwrap();
    let s = [0.3, 0.1, 0.2];
    let out = solve_u0_grid(&m, &s);
    for (k, r) in out.into_iter().enumerate() {
        assert_eq!(r.unwrap(), solve_u0(&m, s[k]).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roots_solve_the_pressure_equation(beta in 0.3f64..0.8, s in 0.05f64..0.5) {
        let m = gw(beta, 5000).with_potential(Potential::polynomial(4.0, 1.0, 0.5).unwrap()).unwrap();
        let sol = solve_u0(&m, s).unwrap();
        match sol.kind {
            SolveKind::Root => prop_assert!(m.excess(sol.u0, s).unwrap().abs() < 1e-12),
            SolveKind::Abscissa => prop_assert!(sol.induced_pressure_at_u0 <= 0.0),
        }
    }

    #[test]
    fn eigenvalue_decreases_in_u(beta in 0.2f64..0.9, u in 1e-4f64..0.5) {
        let m = gw(beta, 2000);
        let c = eigen_curve(&m, &[(u, 0.0)]).unwrap();
        prop_assert!(c.dlambda_du[0] < 0.0);
        prop_assert!(c.lambda[0] < 1.0);
    }
}
