//! Image of a Cantor time set under planar reflected motion.

use rbm_trace::fracdim::{cantor_timeset, image_dimension, CantorSpec};
use rbm_trace::geometry::make_square;
use rbm_trace::rbm::simulate_rbm;

fn main() -> rbm_trace::Result<()> {
    let sq = make_square(1.0)?;
    let spec = CantorSpec::middle_thirds(10, 10.0);
    let dt = 1e-5;
    let e = cantor_timeset(&spec, dt)?;
    let path = simulate_rbm(&sq, &[0.5, 0.5], 10.0, dt, 11)?;
    // finest boxes stay above the walk's resolution sqrt(dt)
    let est = image_dimension(&path, &e, 5, 8)?;
    println!(
        "time set dimension {:.3}, image dimension {:.3} (doubling predicts {:.3})",
        spec.analytic_dimension(),
        est.slope,
        2.0 * spec.analytic_dimension()
    );
    Ok(())
}
