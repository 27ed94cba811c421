//! Runs the estimator on fixtures whose dimension is known.

use rbm_trace::harness::calibration_gate;

fn main() -> rbm_trace::Result<()> {
    for r in calibration_gate()? {
        println!(
            "{} {:<28} analytic {:.4} estimate {:.4}",
            if r.passed { "PASS" } else { "FAIL" },
            r.fixture,
            r.analytic,
            r.estimate
        );
    }
    Ok(())
}
