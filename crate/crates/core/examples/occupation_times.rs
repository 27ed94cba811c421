//! Boundary occupation times of one path in the square and their box dimension.

use rbm_trace::fracdim::{box_counts_time, fit_loglog, FitWindow};
use rbm_trace::geometry::make_square;
use rbm_trace::rbm::{boundary_hit_times, simulate_rbm};

fn main() -> rbm_trace::Result<()> {
    let sq = make_square(1.0)?;
    let dt = 1e-5;
    let path = simulate_rbm(&sq, &[0.5, 0.5], 10.0, dt, 3)?;
    let ts = boundary_hit_times(&sq, &path, 2.0 * dt.sqrt())?;
    println!("{} of {} cells within eps of the boundary", ts.count(), ts.len());
    let bc = box_counts_time(&ts, 0, 16)?;
    for (k, c) in bc.levels.iter().zip(&bc.counts) {
        println!("  level {k:>2}  boxes {c}");
    }
    let est = fit_loglog(&bc.scales, &bc.counts, FitWindow::Range(9, 13))?;
    println!("dimension {:.3} (r2 {:.3}); a Lipschitz boundary gives 1/2", est.slope, est.r2);
    Ok(())
}
