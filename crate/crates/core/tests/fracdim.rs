use proptest::prelude::*;
use rbm_trace::fracdim::*;
use rbm_trace::geometry::make_koch_snowflake;
use rbm_trace::geometry::koch::koch_dimension;
use rbm_trace::rbm::{fold_1d, PathSample};
use rbm_trace::rng::CounterRng;
use rbm_trace::timeset::TimeSet;

#[test]
fn full_interval_counts_every_box() {
    let ts = TimeSet::full(1.0, 1.0 / 4096.0).unwrap();
    let bc = box_counts_time(&ts, 0, 10).unwrap();
    for (k, c) in bc.levels.iter().zip(&bc.counts) {
        assert_eq!(*c, 1u64 << k);
    }
    let e = fit_loglog(&bc.scales, &bc.counts, FitWindow::All).unwrap();
    assert!((e.slope - 1.0).abs() < 1e-12);
}

#[test]
fn single_cell_meets_one_or_two_boxes() {
    let mut ts = TimeSet::empty(1.0, 1.0 / 4096.0).unwrap();
    ts.mark(1234);
    let bc = box_counts_time(&ts, 0, 10).unwrap();
    assert!(bc.counts.iter().all(|&c| c == 1 || c == 2));
    assert!(box_counts_time(&ts, 0, 11).is_err());
}

#[test]
fn cantor_time_set_dimension() {
    let spec = CantorSpec::middle_thirds(12, 1.0);
    let ts = cantor_timeset(&spec, 3f64.powi(-12) / 4.0).unwrap();
    assert_eq!(spec.intervals().len(), 4096);
    let bc = box_counts_time(&ts, 0, 18).unwrap();
    let e = fit_loglog(&bc.scales, &bc.counts, FitWindow::Auto).unwrap();
    assert!((e.slope - spec.analytic_dimension()).abs() < 0.02, "slope {}", e.slope);
    assert!(cantor_timeset(&spec, 1e-3).is_err());
}

#[test]
fn analytic_dimensions() {
    let d = |m, r| CantorSpec { pieces: m, ratio: r, depth: 1, horizon: 1.0 }.analytic_dimension();
    assert!((d(2, 1.0 / 3.0) - 0.6309).abs() < 1e-4);
    assert!((d(2, 0.25) - 0.5).abs() < 1e-12);
    assert!((d(3, 0.2) - 0.6826).abs() < 1e-4);
    assert!(CantorSpec { pieces: 3, ratio: 0.4, depth: 1, horizon: 1.0 }.validate().is_err());
}

#[test]
fn filled_grid_has_dimension_two() {
    let n = 512;
    let mut cloud = PointCloud::new(2);
    for i in 0..n {
        for j in 0..n {
            cloud.push(&[(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
        }
    }
    let bc = box_counts_space(&cloud, 1, 8, 0.0).unwrap();
    let e = fit_loglog(&bc.scales, &bc.counts, FitWindow::All).unwrap();
    assert!((e.slope - 2.0).abs() < 0.05, "slope {}", e.slope);
}

#[test]
fn koch_vertices() {
    let s = make_koch_snowflake(7).unwrap();
    let cloud = PointCloud::from_points(2, s.vertices().iter().map(|v| [v.x, v.y]).collect::<Vec<_>>().iter().map(|p| &p[..]));
    let bc = box_counts_space(&cloud, 0, 12, 0.0).unwrap();
    let e = fit_loglog(&bc.scales, &bc.counts, FitWindow::Auto).unwrap();
    assert!((e.slope - koch_dimension()).abs() < 0.05, "slope {}", e.slope);
}

#[test]
fn auto_window_ignores_saturated_scales() {
    // slope-1 counts for 6 levels, then saturation at 600 boxes
    let scales: Vec<f64> = (0..14).map(|k| 0.5f64.powi(k)).collect();
    let counts: Vec<u64> = (0..14).map(|k| (10u64 << k).min(600)).collect();
    let e = fit_loglog(&scales, &counts, FitWindow::Auto).unwrap();
    // oracle: the unsaturated prefix alone
    let xs: Vec<f64> = scales[..6].iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts[..6].iter().map(|&c| (c as f64).ln()).collect();
    assert!((e.slope - ols(&xs, &ys).slope).abs() < 0.01, "slope {}", e.slope);
    assert!(e.window.iter().all(|&i| i < 7));
    assert!(matches!(fit_loglog(&scales[..3], &counts[..3], FitWindow::All), Err(rbm_trace::Error::TooFewScales { .. })));
}

fn free_walk(steps: usize, dt: f64, seed: u64) -> PathSample {
    let rng = CounterRng::new(seed);
    let mut pos = vec![0.0, 0.0];
    let (mut x, mut y) = (0.0, 0.0);
    for k in 0..steps as u64 {
        let (a, b) = rng.normal_pair_at(k, 0);
        x += dt.sqrt() * a;
        y += dt.sqrt() * b;
        pos.extend_from_slice(&[x, y]);
    }
    PathSample::from_positions(dt, steps as f64 * dt, 2, seed, "plane".into(), pos).unwrap()
}

#[test]
fn image_of_single_cell_is_a_point() {
    let p = free_walk(1000, 1e-3, 1);
    let mut e = TimeSet::empty(1.0, 1e-3).unwrap();
    e.mark(10);
    assert_eq!(image_dimension(&p, &e, 0, 6).unwrap().slope, 0.0);
    let empty = TimeSet::empty(1.0, 1e-3).unwrap();
    assert!(image_dimension(&p, &empty, 0, 6).is_err());
    let wrong = TimeSet::full(1.0, 2e-3).unwrap();
    assert!(matches!(image_points(&p, &wrong), Err(rbm_trace::Error::GridMismatch(_))));
}

#[test]
fn planar_image_of_an_interval_fills_the_square() {
    // coordinatewise folding gives reflected motion in the unit square
    let free = free_walk(1_000_000, 1e-5, 2);
    let folded: Vec<f64> = free.raw().iter().map(|&v| fold_1d(v + 0.5, 0.0, 1.0).unwrap()).collect();
    let p = PathSample::from_positions(free.dt, free.horizon, 2, 2, "square".into(), folded).unwrap();
    let e = TimeSet::full(p.horizon, p.dt).unwrap();
    let d = image_dimension(&p, &e, 1, 6).unwrap().slope;
    assert!((d - 2.0).abs() < 0.10, "dimension {d}");
}

#[test]
fn planar_image_of_cantor_doubles() {
    let spec = CantorSpec::middle_thirds(8, 1.0);
    let dt = 3f64.powi(-8) / 4.0;
    let steps = (1.0 / dt).round() as usize;
    let p = free_walk(steps, dt, 3);
    let e = cantor_timeset(&spec, dt).unwrap();
    let d = image_dimension(&p, &e, 1, 6).unwrap().slope;
    assert!((d - 2.0 * spec.analytic_dimension()).abs() < 0.2, "dimension {d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_sets_have_nested_counts(flags in prop::collection::vec(any::<bool>(), 256), mask in prop::collection::vec(any::<bool>(), 256)) {
        let big = TimeSet::from_flags(1.0, 1.0 / 256.0, flags.iter().copied()).unwrap();
        let small = TimeSet::from_flags(1.0, 1.0 / 256.0, flags.iter().zip(&mask).map(|(a, b)| *a && *b)).unwrap();
        prop_assert!(small.is_subset_of(&big));
        let cb = box_counts_time(&big, 0, 6).unwrap();
        let cs = box_counts_time(&small, 0, 6).unwrap();
        for (a, b) in cs.counts.iter().zip(&cb.counts) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn dilation_leaves_counts_unchanged(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..200), scale in 0.01f64..100.0) {
        let flat: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        let cloud = PointCloud::from_points(2, flat.iter().map(|p| &p[..]));
        let a = box_counts_space(&cloud, 0, 6, 0.0).unwrap();
        let b = box_counts_space(&cloud.scaled(scale), 0, 6, 0.0).unwrap();
        // dilation changes float rounding at box edges only
        for (x, y) in a.counts.iter().zip(&b.counts) {
            prop_assert!((*x as i64 - *y as i64).abs() <= (*x as i64) / 10 + 1);
        }
    }
}
