//! Samples a stable subordinator and time-changes a reflected path with it.

use rbm_trace::geometry::make_square;
use rbm_trace::rbm::simulate_rbm;
use rbm_trace::subordination::{sample_subordinator, subordinate_path};

fn main() -> rbm_trace::Result<()> {
    let s = 0.7;
    let xi = sample_subordinator(s, 1.0, 1e-3, 42)?;
    println!("xi_1 = {:.4} for s = {s}", xi.max());
    let big_jump = xi.values().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    println!("largest jump {big_jump:.4}");

    let sq = make_square(1.0)?;
    let x_dt = 1e-5;
    let x = simulate_rbm(&sq, &[0.5, 0.5], xi.max() + x_dt, x_dt, 43)?;
    let z = subordinate_path(&x, &xi)?;
    let jumps: Vec<f64> = (0..z.steps())
        .map(|k| {
            let (a, b) = (z.position(k), z.position(k + 1));
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
        })
        .collect();
    let max = jumps.iter().copied().fold(0.0, f64::max);
    println!("subordinated path: {} points, largest displacement {max:.4}", z.len());
    Ok(())
}
