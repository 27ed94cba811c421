//! One test per acceptance criterion at full budget. Each prints a single
//! `[PASS]` or `[FAIL]` line; run with `--nocapture` to see them.

use std::time::Instant;

use rbm_trace::geometry::make_square;
use rbm_trace::harness::*;
use rbm_trace::rbm::{cube_hit_count, holder_exponent, simulate_rbm};
use rbm_trace::rng::derive_seed;
use rbm_trace::subordination::sample_subordinator;

fn line(ok: bool, id: &str, detail: String) -> bool {
    println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn judged(id: &str, report: &ExperimentReport, tol: Tolerance) -> bool {
    let a = &report.aggregate;
    let ok = a.n > 0 && report.failed_paths * 10 <= report.rows.len() && tol.admits(report.predicted, a.mean);
    line(
        ok,
        id,
        format!(
            "mean {:.4} +/- {:.4} over {} paths ({} failed), predicted {:.4} within -{:.2}/+{:.2}",
            a.mean, a.stderr, a.n, report.failed_paths, report.predicted, tol.below, tol.above
        ),
    )
}

fn joint(preset: &str) -> Vec<ExperimentReport> {
    let cfg = ExperimentConfig::preset(preset).unwrap();
    run_joint(&cfg, &[Observable::Occupation, Observable::Trace], RunOptions::default()).unwrap()
}

#[test]
fn c01_calibration_gate() {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in calibration_gate().unwrap() {
        ok &= (r.estimate - r.analytic).abs() <= 0.05;
        parts.push(format!("{} {:.4} (analytic {:.4})", r.fixture, r.estimate, r.analytic));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    assert!(line(ok, "C1 calibration", format!("{} in {secs:.1}s", parts.join(", "))));
}

#[test]
fn c02_c03_square() {
    let r = joint("square-occupation");
    let occ = judged("C2 square occupation", &r[0], Tolerance { below: 0.15, above: 0.05 });
    let tr = judged("C3 square trace", &r[1], Tolerance::symmetric(0.10));
    assert!(occ && tr, "occupation {occ}, trace {tr}");
}

#[test]
fn c04_snowflake() {
    let r = joint("snowflake-occupation");
    let tol = Tolerance { below: 0.15, above: 0.05 };
    let tr = judged("C4 snowflake trace", &r[1], tol);
    let occ = judged("C4 snowflake occupation", &r[0], tol);
    assert!(occ && tr, "occupation {occ}, trace {tr}");
}

#[test]
fn c05_product() {
    let r = joint("product-occupation");
    let tr = judged("C5 product trace", &r[1], Tolerance::symmetric(0.15));
    let occ = judged("C5 product occupation", &r[0], Tolerance::symmetric(0.15));
    assert!(occ && tr, "occupation {occ}, trace {tr}");
}

#[test]
fn c06_uniform_doubling() {
    let cantor = run_experiment(&ExperimentConfig::preset("doubling-cantor").unwrap()).unwrap();
    let full = run_experiment(&ExperimentConfig::preset("doubling-full").unwrap()).unwrap();
    let a = judged("C6 image of Cantor set", &cantor, Tolerance::symmetric(0.15));
    let b = judged("C6 image of full interval", &full, Tolerance::symmetric(0.10));
    assert!(a && b);
}

#[test]
fn c07_subordinator_laplace_transform() {
    let t = Instant::now();
    let n = 100_000u64;
    let mut ok = true;
    let mut worst = 0.0f64;
    for s in [0.3, 0.5, 0.8] {
        let xi1: Vec<f64> = (0..n)
            .map(|i| sample_subordinator(s, 1.0, 0.25, derive_seed(7, i)).unwrap().max())
            .collect();
        for lambda in [0.5f64, 1.0, 2.0] {
            let ys: Vec<f64> = xi1.iter().map(|v| (-lambda * v).exp()).collect();
            let mean = ys.iter().sum::<f64>() / n as f64;
            let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let z = (mean - (-lambda.powf(s)).exp()).abs() / (var / n as f64).sqrt();
            worst = worst.max(z);
            ok &= z < 3.0;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    assert!(line(ok, "C7 subordinator law", format!("largest deviation {worst:.2} standard errors in {secs:.1}s")));
}

#[test]
fn c08_stable_like_occupation() {
    let r = run_experiment(&ExperimentConfig::preset("subordinated-occupation").unwrap()).unwrap();
    let a = judged("C8 subordinated occupation s=0.9", &r, Tolerance::symmetric(0.15));
    let polar = ExperimentConfig {
        s: Some(0.4),
        paths: 16,
        horizon: 4.0,
        clock_dt: Some(0.01),
        ..ExperimentConfig::preset("subordinated-occupation").unwrap()
    };
    let r = run_experiment(&polar).unwrap();
    let empty = r.rows.iter().filter(|row| row.empty_set).count();
    let ok = r.failed_paths * 10 <= r.rows.len() && (empty == r.aggregate.n || r.aggregate.mean < 0.1);
    let b = line(
        ok,
        "C8 subordinated occupation s=0.4",
        format!(
            "mean {:.4} +/- {:.4}, {} of {} sets empty, {} failed; need empty or < 0.1",
            r.aggregate.mean, r.aggregate.stderr, empty, r.aggregate.n, r.failed_paths
        ),
    );
    assert!(a && b);
}

#[test]
fn c09_cube_count() {
    let sq = make_square(1.0).unwrap();
    let p = simulate_rbm(&sq, &[0.5, 0.5], 10.0, 1e-5, derive_seed(9, 0)).unwrap();
    let xs: Vec<f64> = (1..=8).map(|j| 2f64.powi(j).ln()).collect();
    let ys: Vec<f64> = (1..=8).map(|j| (cube_hit_count(&p, 0.5f64.powi(j)) as f64).ln()).collect();
    let slope = rbm_trace::fracdim::ols(&xs, &ys).slope;
    assert!(line(slope <= 2.15, "C9 cube count", format!("slope {slope:.4}, need <= 2.15")));
}

#[test]
fn c10_holder_regularity() {
    let sq = make_square(1.0).unwrap();
    let mean_exponent = |dt: f64| {
        (0..4)
            .map(|i| {
                let p = simulate_rbm(&sq, &[0.5, 0.5], 1.0, dt, derive_seed(10, i)).unwrap();
                holder_exponent(&p).unwrap().exponent
            })
            .sum::<f64>()
            / 4.0
    };
    let h: Vec<f64> = [1e-4, 1e-5, 1e-6].into_iter().map(mean_exponent).collect();
    let in_range = (0.40..=0.55).contains(&h[1]);
    let trend = (h[1] - 0.5).abs() <= (h[0] - 0.5).abs() && (h[2] - 0.5).abs() <= (h[1] - 0.5).abs();
    assert!(line(
        in_range && trend,
        "C10 Hoelder regularity",
        format!("exponents {:.4}, {:.4}, {:.4} at dt 1e-4, 1e-5, 1e-6", h[0], h[1], h[2])
    ));
}

#[test]
fn c11_determinism() {
    let mut differing = Vec::new();
    for p in presets() {
        let mut cfg = p.config();
        cfg.paths = 3;
        cfg.horizon = if cfg.s.is_some() { 0.5 } else { 1.0 };
        cfg.dt = 1e-4;
        if let Some(TimeSetConfig::Cantor(c)) = cfg.time_set.as_mut() {
            c.horizon = cfg.horizon;
            c.depth = 6;
        }
        let a = run_experiment_with(&cfg, RunOptions { workers: Some(1) }).unwrap();
        let b = run_experiment_with(&cfg, RunOptions { workers: Some(4) }).unwrap();
        if a.content_json().unwrap() != b.content_json().unwrap() {
            differing.push(p.name);
        }
    }
    assert!(line(
        differing.is_empty(),
        "C11 determinism",
        format!("{} presets rerun at 1 and 4 workers, differing: {differing:?}", presets().len())
    ));
}

#[test]
fn corridor_trend() {
    // estimates carry Monte Carlo error, so a rise is tolerated up to two
    // combined standard errors
    let mut rows = Vec::new();
    for w in [1.0, 1.5, 2.0] {
        let mut cfg = ExperimentConfig::preset("corridor-trace").unwrap();
        cfg.domain = DomainConfig::Corridor {
            generations: 4,
            width_exponent: w,
        };
        let r = run_experiment(&cfg).unwrap();
        rows.push((w, r.aggregate.mean, r.aggregate.stderr));
    }
    let ok = rows
        .windows(2)
        .all(|p| p[1].1 <= p[0].1 + 2.0 * (p[0].2.powi(2) + p[1].2.powi(2)).sqrt());
    let detail: Vec<String> = rows.iter().map(|(w, m, se)| format!("w={w}: {m:.4} +/- {se:.4}")).collect();
    assert!(line(ok, "corridor trend (exploratory)", format!("{}; must not increase", detail.join(", "))));
}
