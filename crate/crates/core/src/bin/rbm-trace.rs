use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rbm_trace::harness::{
    calibration_gate, emit_outputs, preset_catalog, run_experiment_with, ExperimentConfig, RunOptions, Verdict,
};

#[derive(Parser)]
#[command(name = "rbm-trace", version, about = "Boundary dimension experiments for reflecting Brownian motion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset and write report.json plus plot CSVs.
    Run {
        #[arg(long)]
        preset: Option<String>,
        /// JSON config; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long = "T")]
        horizon: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the preset catalog.
    List,
    /// Check the estimator on fixtures of known dimension.
    Calibrate,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> rbm_trace::Result<bool> {
    match cli.command {
        Command::List => {
            for e in preset_catalog() {
                let tag = if e.gating { "" } else { " (exploratory)" };
                println!("{:<24} {:>7.4}  {}{}", e.name, e.predicted, e.citation, tag);
            }
            Ok(true)
        }
        Command::Calibrate => {
            let mut ok = true;
            for r in calibration_gate()? {
                println!(
                    "{} {:<28} analytic {:.4} estimate {:.4} (tolerance {:.2})",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.fixture,
                    r.analytic,
                    r.estimate,
                    r.tolerance
                );
                ok &= r.passed;
            }
            Ok(ok)
        }
        Command::Run {
            preset,
            config,
            paths,
            horizon,
            dt,
            s,
            seed,
            out,
            workers,
        } => {
            let mut cfg = match (&config, &preset) {
                (Some(path), _) => ExperimentConfig::load(path)?,
                (None, Some(name)) => ExperimentConfig::preset(name)?,
                (None, None) => {
                    return Err(rbm_trace::Error::InvalidParameter {
                        name: "preset",
                        reason: "give --preset or --config".into(),
                    })
                }
            };
            if let (Some(name), Some(_)) = (&preset, &config) {
                if *name != cfg.preset {
                    let mut fresh = ExperimentConfig::preset(name)?;
                    fresh.out_dir = cfg.out_dir.take();
                    cfg = fresh;
                }
            }
            if let Some(v) = paths {
                cfg.paths = v;
            }
            if let Some(v) = horizon {
                cfg.horizon = v;
            }
            if let Some(v) = dt {
                cfg.dt = v;
            }
            if let Some(v) = s {
                cfg.s = Some(v);
            }
            if let Some(v) = seed {
                cfg.master_seed = v;
            }
            if let Some(v) = out {
                cfg.out_dir = Some(v);
            }
            cfg.validate()?;
            let report = run_experiment_with(&cfg, RunOptions { workers })?;
            let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&cfg.preset));
            emit_outputs(&report, &dir)?;
            let a = &report.aggregate;
            println!(
                "{}: mean {:.4} +/- {:.4} (n={}, failed {}), predicted {:.4} [-{:.2}, +{:.2}] -> {:?}",
                report.preset,
                a.mean,
                a.stderr,
                a.n,
                report.failed_paths,
                report.predicted,
                report.tolerance.below,
                report.tolerance.above,
                report.verdict
            );
            println!("wrote {}", dir.display());
            Ok(report.verdict != Verdict::Fail)
        }
    }
}
