use plab_core::maps::{
    first_return, flat_fixed_point, flat_induced_model, gaspard_wang_model, orbit, pm_backward_orbit,
    pm_cylinders, pm_induced_model, pm_left_inverse, IntervalMapDescriptor, MapFamily, TailKind,
};
use plab_core::numerics::power_law_fit;
use proptest::prelude::*;

fn pm(alpha: f64, b: f64) -> IntervalMapDescriptor<f64> {
    IntervalMapDescriptor::new(MapFamily::PomeauManneville { alpha, b }).unwrap()
}

#[test]
fn pm_backward_orbit_scaling() {
    // with y = 2x the neutral branch is y(1 + y^α), so y_n ≈ (αn)^{−1/α}
    for alpha in [1.5f64, 2.0, 3.0] {
        let xs = pm_backward_orbit(alpha, 20_000).unwrap();
        assert_eq!(xs[0], 0.5);
        assert!(xs.windows(2).all(|w| w[1] < w[0]));
        let n = 20_000f64;
        let scaled = 2.0 * xs[20_000] * (alpha * n).powf(1.0 / alpha);
        assert!((scaled - 1.0).abs() < 0.01, "α = {alpha}: {scaled}");
    }
}

#[test]
fn pm_cylinders_tile_the_inducing_set() {
    let n_max = 500;
    let table = pm_cylinders(2.0f64, 1.0, 1.0, n_max).unwrap();
    let xs = pm_backward_orbit(2.0, n_max as usize).unwrap();
    assert_eq!(table.domain, (0.5, 1.0));
    assert_eq!(table.rows.len(), n_max as usize);
    let uncovered = xs[n_max as usize - 1] / 2.0;
    assert!((table.total_length() - (0.5 - uncovered)).abs() < 1e-12);
    for w in table.rows.windows(2) {
        assert!((w[0].left - w[1].right).abs() < 1e-15);
        assert!(w[1].weight < w[0].weight);
    }
    let flat = pm_cylinders(2.0f64, 1.0, 0.0, 50).unwrap();
    assert!(flat.rows.iter().all(|c| c.weight == 1.0));
}

#[test]
fn pm_cylinder_points_return_on_time() {
    let map = pm(2.0, 1.0);
    let table = pm_cylinders(2.0f64, 1.0, 1.0, 200).unwrap();
    for c in table.rows.iter().take(200) {
        assert_eq!(first_return(&map, c.representative, 1000).unwrap(), Some(c.n), "cylinder {}", c.n);
    }
}

#[test]
fn pm_tail_exponent() {
    // the normalized tail of the t = 1 model decays like n^{−1/α}
    for alpha in [2.0f64, 3.0] {
        let m = pm_induced_model(alpha, 1.0, 1.0, 5000).unwrap().normalize().unwrap();
        assert!((m.partition(0.0, 0.0).unwrap() - 1.0).abs() < 1e-10);
        let ns: Vec<f64> = (0..20).map(|k| 100.0 * 20f64.powf(k as f64 / 19.0)).collect();
        let tails: Vec<f64> = ns.iter().map(|&n| m.tail(n as u64)).collect();
        let fit = power_law_fit(&ns, &tails).unwrap();
        assert!((-fit.exponent - 1.0 / alpha).abs() < 0.02, "α = {alpha}: {}", fit.exponent);
        assert!(m.expected_tau(0.0, 0.0).unwrap().is_infinite());
    }
    assert!(pm_induced_model(2.0f64, 1.0, 1.0, 10).unwrap_err().is_config());
}

#[test]
fn pm_non_markov_branch() {
    // b < 1: the right branch only reaches [0, b]
    let map = pm(2.0, 0.6);
    assert_eq!(map.inverse_branches(0.8).unwrap().len(), 1);
    assert_eq!(map.inverse_branches(0.3).unwrap().len(), 2);
    let table = pm_cylinders(2.0f64, 0.6, 1.0, 300).unwrap();
    assert!(table.rows.iter().all(|c| c.right <= 1.0 + 1e-15));
}

#[test]
fn flat_map_fixed_point_and_branches() {
    let (alpha, b) = (2.0f64, 1.0);
    let map = IntervalMapDescriptor::new(MapFamily::Flat { alpha, b }).unwrap();
    let p = flat_fixed_point(alpha, b).unwrap();
    assert!((map.forward(p).unwrap() - p).abs() < 1e-14);
    assert!((map.forward(-p).unwrap() - p).abs() < 1e-14);
    assert_eq!(map.inducing_set().unwrap(), (-p, p));
    for y in [-0.9, -0.2, 0.0, 0.5, 0.99] {
        for x in map.inverse_branches(y).unwrap() {
            assert!((map.forward(x).unwrap() - y).abs() < 1e-12, "y = {y}, x = {x}");
        }
    }
    // derivative against a central difference
    let x = 0.7;
    let h = 1e-6;
    let fd = (map.forward(x + h).unwrap() - map.forward(x - h).unwrap()) / (2.0 * h);
    assert!((map.derivative(x).unwrap() / fd.abs() - 1.0).abs() < 1e-8);
}

#[test]
fn flat_map_tail_constant() {
    for (alpha, b) in [(2.0f64, 1.0), (3.0, 0.5)] {
        let fm = flat_induced_model(alpha, b, 10_000).unwrap();
        let beta = 1.0 / alpha;
        let scale = ((2.0 * alpha * b).ln() / b).powf(beta);
        let ratio = fm.a[10_000] * 10_000f64.powf(beta) * scale;
        assert!((ratio - 1.0).abs() < 0.02, "α = {alpha}: {ratio}");
        assert!(fm.a.windows(2).skip(1).all(|w| w[1] < w[0]));
        assert!((fm.r - 1.0 / (2.0 * alpha * b)).abs() < 1e-15);
    }
    assert!(flat_induced_model(0.4f64, 1.0, 1000).unwrap_err().is_config());
}

#[test]
fn gaspard_wang_orbits_have_the_prescribed_tail() {
    let beta = 0.6;
    let map = IntervalMapDescriptor::new(MapFamily::GaspardWang { beta }).unwrap();
    let (lo, hi) = map.inducing_set().unwrap();
    let n = 20_000;
    let taus: Vec<u64> = (0..n)
        .map(|k| {
            let x = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
            first_return(&map, x, 10_000).unwrap().unwrap_or(u64::MAX)
        })
        .collect();
    for m in [1u64, 2, 5, 20, 100] {
        let frac = taus.iter().filter(|&&t| t > m).count() as f64 / n as f64;
        let want = ((m + 1) as f64).powf(-beta);
        assert!((frac - want).abs() < 1e-3, "m = {m}: {frac} vs {want}");
    }
    let model = gaspard_wang_model(beta, TailKind::ExactPower, 1000).unwrap();
    assert!((model.tail(20) - 21f64.powf(-beta)).abs() < 1e-14);
}

#[test]
fn corrected_tail_model() {
    let m = gaspard_wang_model(0.5, TailKind::WithCorrections, 2000).unwrap();
    for n in [1u64, 10, 500, 5000] {
        let x = n as f64;
        let want = 0.5 * x.powf(-0.5) + 0.5 * x.powf(-1.5);
        assert!((m.tail(n) - want).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn orbit_bookkeeping() {
    let map = IntervalMapDescriptor::new(MapFamily::GaspardWang { beta: 0.5 }).unwrap();
    let o = orbit(&map, 0.93, 500).unwrap();
    assert_eq!(o.visits[0], 0);
    assert_eq!(o.last_visit, *o.visits.last().unwrap());
    assert_eq!(o.return_times.iter().sum::<u64>(), o.last_visit);
    let first = first_return(&map, 0.93, 500).unwrap().unwrap();
    assert_eq!(o.return_times[0], first);
}

#[test]
fn invalid_families() {
    assert!(IntervalMapDescriptor::new(MapFamily::PomeauManneville { alpha: 0.5, b: 1.0 }).unwrap_err().is_config());
    assert!(IntervalMapDescriptor::new(MapFamily::PomeauManneville { alpha: 2.0, b: 1.5 }).unwrap_err().is_config());
    assert!(IntervalMapDescriptor::new(MapFamily::Flat { alpha: 0.2, b: 1.0 }).unwrap_err().is_config());
    assert!(IntervalMapDescriptor::new(MapFamily::StratmannVogt { lambda: 0.7 }).unwrap_err().is_config());
    assert!(IntervalMapDescriptor::new(MapFamily::Fibonacci { lambda: 0.3 }).unwrap_err().is_config());
    let sv = IntervalMapDescriptor::new(MapFamily::StratmannVogt { lambda: 0.5 }).unwrap();
    assert!(sv.inducing_set().unwrap_err().is_config());
}

proptest! {
    #[test]
    fn left_inverse_round_trip(alpha in 1.01f64..4.0, y in 0.0f64..1.0) {
        let x = pm_left_inverse(alpha, y).unwrap();
        prop_assert!((0.0..=0.5).contains(&x));
        prop_assert!((x * (1.0 + (2.0 * x).powf(alpha)) - y).abs() <= 1e-14 * y.max(1e-300) + 1e-300);
    }

    #[test]
    fn pm_points_in_y_return(x in 0.5001f64..1.0) {
        let map = pm(2.0, 1.0);
        let t = first_return(&map, x, 1_000_000).unwrap();
        prop_assert!(t.is_some());
    }
}
