//! Runs a catalog preset at a reduced budget and writes its outputs.
//!
//! `cargo run --release --example run_preset -- [preset] [out-dir]`

use std::path::PathBuf;

use rbm_trace::harness::{emit_outputs, run_experiment, ExperimentConfig};

fn main() -> rbm_trace::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("square-trace", String::as_str);
    let dir = args.get(1).map_or_else(|| PathBuf::from("out").join(name), PathBuf::from);
    let cfg = ExperimentConfig {
        paths: 4,
        horizon: 5.0,
        dt: 1e-4,
        ..ExperimentConfig::preset(name)?
    };
    let report = run_experiment(&cfg)?;
    for row in &report.rows {
        println!("path {:>2}  dimension {:?}", row.index, row.dimension);
    }
    println!(
        "mean {:.3} +/- {:.3}, predicted {:.3} ({})",
        report.aggregate.mean, report.aggregate.stderr, report.predicted, report.citation
    );
    for f in emit_outputs(&report, &dir)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
