mod common;

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use plab_core::combinatorics::sv_model;
use plab_core::maps::{gaspard_wang_model, TailKind};
use plab_core::pressure::{solve_u0, SolveKind};
use plab_core::renewal::{
    arcsine_cdf, correlation, ks_distance, ks_two_sample, model_renewal, renewal_exact,
    renewal_sequence, renewal_sequence_fft, simulate_last_visit, simulate_last_visit_at,
    SimulationMode,
};
use plab_core::{Model, Potential};
use proptest::prelude::*;

fn gw(beta: f64, n_max: u64) -> Model {
    gaspard_wang_model(beta, TailKind::ExactPower, n_max).unwrap()
}

/// Plain `O(n²)` recursion, written out independently of the library.
fn convolve(q: &[f64], n: usize) -> Vec<f64> {
    let mut u = vec![0.0; n + 1];
    u[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for j in 1..=k.min(q.len() - 1) {
            acc += q[j] * u[k - j];
        }
        u[k] = acc;
    }
    u
}

fn exact_power_law(beta: f64, n: usize) -> Vec<f64> {
    let mut q = vec![0.0; n + 1];
    for (k, slot) in q.iter_mut().enumerate().skip(1) {
        *slot = (k as f64).powf(-beta) - ((k + 1) as f64).powf(-beta);
    }
    q
}

#[test]
fn geometric_law_has_constant_sequence() {
    let q: Vec<f64> = (0..=200).map(|k| if k == 0 { 0.0 } else { 0.5f64.powi(k) }).collect();
    let seq = renewal_sequence(&q, 200).unwrap();
    assert_eq!(seq.u[0], 1.0);
    assert!(seq.u[1..].iter().all(|v| (v - 0.5).abs() < 1e-15));
    assert!(seq.recursion_defect() < 1e-15);
    assert_eq!(seq.n_max(), 200);
}

#[test]
fn two_point_law_exact() {
    // q₁ = q₂ = ½: u_n = (2 + (−½)ⁿ)/3
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let q = vec![BigRational::from_integer(BigInt::from(0)), half.clone(), half];
    let u = renewal_exact(&q, 30).unwrap();
    for (n, v) in u.iter().enumerate() {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let want = (BigRational::from_integer(BigInt::from(2))
            + BigRational::new(BigInt::from(sign), BigInt::from(2).pow(n as u32)))
            / BigRational::from_integer(BigInt::from(3));
        assert_eq!(*v, want, "n = {n}");
    }
    let f = renewal_sequence(&[0.0, 0.5, 0.5], 30).unwrap();
    for n in 0..=30 {
        let want = (2.0 + (-0.5f64).powi(n as i32)) / 3.0;
        assert!((f.u[n] - want).abs() < 1e-15);
    }
}

#[test]
fn fft_path_matches_direct_convolution() {
    let q = exact_power_law(0.75, 8192);
    let direct = renewal_sequence(&q, 8192).unwrap();
    let fast = renewal_sequence_fft(&q, 8192).unwrap();
    let oracle = convolve(&q, 8192);
    for n in 0..=8192 {
        assert!((direct.u[n] - oracle[n]).abs() < 1e-13, "n = {n}");
        assert!((fast.u[n] - oracle[n]).abs() < 1e-12, "n = {n}");
    }
    assert!(fast.recursion_defect() < 1e-12);
}

#[test]
fn small_horizon_against_extended_precision() {
    let rm = RoundingMode::ToEven;
    let p = common::PREC;
    let mut o = common::Oracle::new();
    let n = 200;
    let mb = o.f(-0.75);
    let mut q = vec![o.f(0.0)];
    let mut prev = o.f(1.0);
    for k in 1..=n as u64 {
        let next = o.pow(&BigFloat::from_u64(k + 1, p), &mb);
        q.push(prev.sub(&next, p, rm));
        prev = next;
    }
    let mut u = vec![o.f(1.0)];
    for k in 1..=n {
        let mut acc = o.f(0.0);
        for j in 1..=k {
            acc = acc.add(&q[j].mul(&u[k - j], p, rm), p, rm);
        }
        u.push(acc);
    }
    let m = gw(0.75, 1000);
    let seq = model_renewal(&m, 0.0, 0.0, n).unwrap();
    for k in [1, 2, 10, 50, 200] {
        let want = o.to_f64(&u[k]);
        assert!((seq.u[k] / want - 1.0).abs() < 1e-13, "n = {k}: {} vs {want}", seq.u[k]);
    }
}

#[test]
fn limit_constant_at_three_quarters() {
    // n^{1−β}u_n → sin(πβ)/π for μ̄(τ > n) ~ n^{−β}
    let n = 20_000;
    let oracle = convolve(&exact_power_law(0.75, n), n);
    let m = gw(0.75, 25_000);
    let seq = model_renewal(&m, 0.0, 0.0, n).unwrap();
    for k in [1_000, 10_000, 20_000] {
        assert!((seq.u[k] / oracle[k] - 1.0).abs() < 1e-11, "n = {k}");
    }
    let scaled = |k: usize| (k as f64).powf(0.25) * oracle[k];
    // frozen from the direct convolution above
    assert!((scaled(n) - 0.237_982_881_937_854).abs() < 1e-12, "{}", scaled(n));
    // the approach to sin(πβ)/π is slow, relative error ∝ n^{β−1}
    let limit = (0.75 * std::f64::consts::PI).sin() / std::f64::consts::PI;
    let (near, far) = (scaled(n) / limit - 1.0, scaled(n / 10) / limit - 1.0);
    assert!(near > 0.0 && far > near);
    assert!((near / far - 10f64.powf(-0.25)).abs() < 0.05, "{}", near / far);
}

#[test]
fn correlation_reduces_to_the_renewal_sequence() {
    let m = gw(0.5, 5000).with_potential(Potential::polynomial(4.0, 1.0, 0.5).unwrap()).unwrap();
    let s = 0.1;
    let sol = solve_u0(&m, s).unwrap();
    assert_eq!(sol.kind, SolveKind::Root);
    let n = 300;
    let seq = model_renewal(&m, sol.u0, s, n).unwrap();
    let ones = vec![1.0; n + 1];
    let c = correlation(&m, s, n, &ones, &ones).unwrap();
    assert!((c - seq.u[n]).abs() < 1e-12, "{c} vs {}", seq.u[n]);
    // v = 1{τ = 1}: only the first block contributes
    let mut v = vec![0.0; n + 1];
    v[1] = 1.0;
    let c1 = correlation(&m, s, n, &v, &ones).unwrap();
    assert!((c1 - seq.q[1] * seq.u[n - 1]).abs() < 1e-14);
    // transient drift has no Gibbs law at the pressure
    assert!(correlation(&m, 1e-3, n, &ones, &ones).is_err());
}

#[test]
fn arcsine_law_values() {
    for t in [0.0f64, 0.1, 0.25, 0.5, 0.9, 1.0] {
        let f = arcsine_cdf(0.5, t).unwrap();
        let want = 2.0 / std::f64::consts::PI * t.sqrt().asin();
        assert!((f - want).abs() < 1e-13, "t = {t}");
        for beta in [0.3, 0.75] {
            let a = arcsine_cdf(beta, t).unwrap() + arcsine_cdf(1.0 - beta, 1.0 - t).unwrap();
            assert!((a - 1.0).abs() < 1e-13);
        }
    }
    assert!(arcsine_cdf(1.0, 0.5).unwrap_err().is_config());
    assert!(arcsine_cdf(0.5, 1.5).unwrap_err().is_config());
}

#[test]
fn ks_statistics() {
    let n = 1000;
    let grid: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
    let d = ks_distance(&grid, |x| x).unwrap();
    assert!((d - 0.5 / n as f64).abs() < 1e-15);
    // a single tied atom at 0 jumps over the whole run
    let atoms = vec![0.0; 10];
    assert_eq!(ks_distance(&atoms, |_| 0.0).unwrap(), 1.0);
    let same = ks_two_sample(&grid, &grid).unwrap();
    assert_eq!(same.statistic, 0.0);
    assert!((same.p_value - 1.0).abs() < 1e-12);
    let shifted: Vec<f64> = grid.iter().map(|x| x + 0.1).collect();
    let apart = ks_two_sample(&grid, &shifted).unwrap();
    assert!((apart.statistic - 0.1).abs() <= 1.5 / n as f64, "{apart:?}");
    assert!(apart.p_value < 1e-3);
    assert!(ks_distance(&[], |x| x).unwrap_err().is_config());
}

#[test]
fn last_visit_follows_the_arcsine_law() {
    let m = sv_model(0.5, 1.0, 10_000).unwrap();
    let sample = simulate_last_visit(&m, None, 10_000, 100_000, 1, SimulationMode::Skeleton).unwrap();
    let ks = ks_distance(&sample.values, |t| arcsine_cdf(0.5, t).unwrap()).unwrap();
    assert!(ks <= 0.01, "{ks}");
    assert!(sample.values.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn simulation_is_reproducible() {
    let m = gw(0.75, 2000);
    let run = |threads: usize, seed: u64| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_last_visit(&m, None, 2000, 2000, seed, SimulationMode::Skeleton).unwrap())
    };
    let a = run(1, 7);
    let b = run(3, 7);
    let c = run(1, 8);
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
}

#[test]
fn deterministic_clock_ends_at_the_horizon() {
    let m = Model::from_masses(&[1.0], None).unwrap();
    let sample = simulate_last_visit(&m, None, 50, 1000, 3, SimulationMode::Skeleton).unwrap();
    assert!(sample.values.iter().all(|v| *v == 1.0));
}

#[test]
fn invalid_inputs() {
    assert!(renewal_sequence(&[0.5, 0.5], 10).unwrap_err().is_config());
    assert!(renewal_sequence(&[0.0, 0.7, 0.7], 10).unwrap_err().is_config());
    assert!(renewal_sequence::<f64>(&[], 10).unwrap_err().is_config());
    assert!(renewal_sequence(&[0.0, -0.1], 10).unwrap_err().is_config());
    let m = gw(0.5, 100);
    assert!(simulate_last_visit(&m, None, 100, 10, 1, SimulationMode::Skeleton).unwrap_err().is_config());
    assert!(simulate_last_visit(&m, None, 100, 1000, 1, SimulationMode::Orbit).unwrap_err().is_config());
    assert!(simulate_last_visit_at(&m, None, 0.0, 0.0, 0, 1000, 1, SimulationMode::Skeleton).unwrap_err().is_config());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sequence_is_a_probability(w in prop::collection::vec(0.0f64..1.0, 1..40), keep in 0.1f64..1.0) {
        let total: f64 = w.iter().sum::<f64>().max(1e-12);
        let mut q = vec![0.0];
        q.extend(w.iter().map(|x| keep * x / total));
        let seq = renewal_sequence(&q, 300).unwrap();
        prop_assert!(seq.u.iter().all(|v| *v >= 0.0 && *v <= 1.0 + 1e-12));
        prop_assert!(seq.recursion_defect() < 1e-13);
    }

    #[test]
    fn fft_agrees_with_direct(w in prop::collection::vec(0.0f64..1.0, 1..60), n in 1usize..700) {
        let total: f64 = w.iter().sum::<f64>().max(1e-12);
        let mut q = vec![0.0];
        q.extend(w.iter().map(|x| x / total));
        let a = renewal_sequence(&q, n).unwrap();
        let b = renewal_sequence_fft(&q, n).unwrap();
        for k in 0..=n {
            prop_assert!((a.u[k] - b.u[k]).abs() < 1e-11);
        }
    }
}
