use proptest::prelude::*;
use rbm_trace::fracdim::{box_counts_time, cantor_timeset, fit_loglog, CantorSpec, FitWindow};
use rbm_trace::geometry::*;
use rbm_trace::rbm::*;
use rbm_trace::rng::derive_seed;
use rbm_trace::subordination::*;
use rbm_trace::timeset::TimeSet;

const SAMPLES: u64 = 100_000;

/// Mean and standard error of `exp(-lambda * v)`.
fn laplace(values: &[f64], lambda: f64) -> (f64, f64) {
    let n = values.len() as f64;
    let ys: Vec<f64> = values.iter().map(|v| (-lambda * v).exp()).collect();
    let mean = ys.iter().sum::<f64>() / n;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn xi_at(s: f64, horizon: f64, dt: f64, master: u64) -> Vec<f64> {
    (0..SAMPLES)
        .map(|i| sample_subordinator(s, horizon, dt, derive_seed(master, i)).unwrap().max())
        .collect()
}

#[test]
fn laplace_transform_of_unit_time() {
    for s in [0.3, 0.5, 0.8] {
        let xi1 = xi_at(s, 1.0, 0.25, 17);
        for lambda in [0.5, 1.0, 2.0] {
            let (mean, se) = laplace(&xi1, lambda);
            let exact = (-f64::powf(lambda, s)).exp();
            assert!((mean - exact).abs() < 3.0 * se, "s={s} lambda={lambda}: {mean} vs {exact} (se {se})");
        }
    }
}

#[test]
fn scaling_self_similarity() {
    let s = 0.5;
    let c: f64 = 2.0;
    let xi1 = xi_at(s, 1.0, 0.25, 31);
    let scaled: Vec<f64> = xi_at(s, c, 0.25, 32).iter().map(|v| v / c.powf(1.0 / s)).collect();
    let (a, sa) = laplace(&xi1, 1.0);
    let (b, sb) = laplace(&scaled, 1.0);
    assert!((a - b).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "{a} vs {b}");
}

#[test]
fn identity_clock_reproduces_the_path() {
    let sq = make_square(1.0).unwrap();
    let x = simulate_rbm(&sq, &[0.5, 0.5], 1.0, 1e-3, 8).unwrap();
    let z = subordinate_path(&x, &SubordinatorPath::identity(1e-3, 1.0)).unwrap();
    assert_eq!(z.raw(), x.raw());
}

#[test]
fn zero_clock_stays_at_start() {
    let sq = make_square(1.0).unwrap();
    let x = simulate_rbm(&sq, &[0.3, 0.7], 1.0, 1e-3, 8).unwrap();
    let z = subordinate_path(&x, &SubordinatorPath::constant_zero(1e-2, 2.0)).unwrap();
    assert!(z.positions().all(|p| p == [0.3, 0.7]));
}

#[test]
fn clock_beyond_the_path_is_refused() {
    let sq = make_square(1.0).unwrap();
    let x = simulate_rbm(&sq, &[0.5, 0.5], 1.0, 1e-3, 8).unwrap();
    let xi = SubordinatorPath::identity(1e-3, 2.0);
    assert!(matches!(subordinate_path(&x, &xi), Err(rbm_trace::Error::HorizonExceeded { .. })));
    let r = walk_subordinated(&sq, &[0.5, 0.5], 1e-3, 0.05, 8, &xi, 1000, |_, _, _| {});
    assert!(matches!(r, Err(rbm_trace::Error::HorizonExceeded { .. })));
}

#[test]
fn streamed_subordination_matches_stored() {
    let d = make_koch_snowflake(3).unwrap();
    let xi = sample_subordinator(0.7, 1.0, 1e-3, 5).unwrap();
    let x_dt = 1e-4;
    let x = simulate_rbm(&d, &[0.0, 0.0], xi.max() + 2.0 * x_dt, x_dt, 6).unwrap();
    let z = subordinate_path(&x, &xi).unwrap();
    let mut streamed = Vec::new();
    walk_subordinated(&d, &[0.0, 0.0], x_dt, 0.05, 6, &xi, DEFAULT_MAX_CLOCK_STEPS, |_, p, _| {
        streamed.extend_from_slice(p)
    })
    .unwrap();
    assert_eq!(streamed, z.raw());
}

#[test]
fn preimage_of_full_and_empty_sets() {
    let xi = sample_subordinator(0.6, 1.0, 1e-3, 2).unwrap();
    let range = xi.max() + 0.01;
    let full = preimage_timeset(&xi, &TimeSet::full(range, 1e-4).unwrap()).unwrap();
    assert_eq!(full.count(), full.len());
    let empty = preimage_timeset(&xi, &TimeSet::empty(range, 1e-4).unwrap()).unwrap();
    assert!(empty.is_empty());
}

#[test]
fn cantor_preimage_dimension() {
    let s = 0.8;
    let dt = 1e-5;
    let mut dims = Vec::new();
    for seed in 0..4 {
        let xi = sample_subordinator(s, 1.0, dt, 40 + seed).unwrap();
        let spec = CantorSpec::middle_thirds(10, xi.max() * 1.001);
        let grid = spec.horizon * (1.0f64 / 3.0).powi(10) / 4.0;
        let e = cantor_timeset(&spec, grid).unwrap();
        let c = preimage_timeset(&xi, &e).unwrap();
        let bc = box_counts_time(&c, 0, 14).unwrap();
        dims.push(fit_loglog(&bc.scales, &bc.counts, FitWindow::Auto).unwrap().slope);
    }
    let mean = dims.iter().sum::<f64>() / dims.len() as f64;
    let bound = s + CantorSpec::middle_thirds(1, 1.0).analytic_dimension() - 1.0;
    assert!(mean >= bound - 0.1, "mean {mean} from {dims:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_clock_is_monotone(s in 0.05f64..0.95, seed in any::<u64>()) {
        let xi = sample_subordinator(s, 1.0, 1e-2, seed).unwrap();
        prop_assert_eq!(xi.values()[0], 0.0);
        prop_assert!(xi.values().windows(2).all(|w| w[1] >= w[0]));
    }
}
