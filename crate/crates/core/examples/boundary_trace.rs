//! Boundary trace of one path in the Koch snowflake and its box dimension.

use rbm_trace::fracdim::{box_counts_space, fit_loglog, FitWindow};
use rbm_trace::geometry::make_koch_snowflake;
use rbm_trace::rbm::{simulate_rbm, trace_points};

fn main() -> rbm_trace::Result<()> {
    let d = make_koch_snowflake(7)?;
    let dt = 1e-5;
    let path = simulate_rbm(&d, &[0.0, 0.0], 100.0, dt, 5)?;
    let pts = trace_points(&d, &path, 2.0 * dt.sqrt())?;
    println!("{} boundary contacts", pts.len());
    let bc = box_counts_space(&pts, 0, 9, dt.sqrt())?;
    for (k, c) in bc.levels.iter().zip(&bc.counts) {
        println!("  level {k}  boxes {c}");
    }
    let est = fit_loglog(&bc.scales, &bc.counts, FitWindow::Range(6, 10))?;
    println!("dimension {:.3}; the boundary has log4/log3 = {:.3}", est.slope, 4f64.ln() / 3f64.ln());
    Ok(())
}
