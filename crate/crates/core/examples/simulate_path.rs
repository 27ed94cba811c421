//! Simulates one reflected path in the Koch snowflake and writes it as CSV.
//!
//! `cargo run --release --example simulate_path -- [T] [dt] [out.csv]`

use std::fs::File;
use std::io::BufWriter;

use rbm_trace::geometry::make_koch_snowflake;
use rbm_trace::rbm::{holder_exponent, simulate_rbm};

fn main() -> rbm_trace::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let horizon: f64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let dt: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1e-5);
    let out = args.get(2).cloned().unwrap_or_else(|| "snowflake_path.csv".into());

    let d = make_koch_snowflake(5)?;
    let path = simulate_rbm(&d, &d.centroid(), horizon, dt, 1)?;
    let h = holder_exponent(&path)?;
    let file = File::create(&out).map_err(|source| rbm_trace::Error::Io {
        path: out.clone().into(),
        source,
    })?;
    path.write_csv(&d, BufWriter::new(file))?;
    println!("{} steps, Hoelder exponent {:.3}, written to {out}", path.steps(), h.exponent);
    Ok(())
}
