//! `fastrate`: run one experiment and write its CSV and metadata.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 config error, 3 a check
//! failed under `--check`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;
use fastrate_core::harness::{emit, run, ExperimentConfig, ExperimentId, ExperimentOutput};
use fastrate_core::Error;
use log::info;

#[derive(Debug, Parser)]
#[command(name = "fastrate", version, about = "Excess-risk, regret and bound experiments")]
struct Cli {
    /// One of rate, regret, stability, sparse, regime, margin.
    experiment: String,

    /// Flat `key = value` or JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// CSV destination; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    replicates: Option<usize>,

    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Exit with status 3 if any acceptance check fails.
    #[arg(long)]
    check: bool,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let id: ExperimentId = cli.experiment.parse()?;
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load_for(id, path)?,
        None => ExperimentConfig::new(id),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(r) = cli.replicates {
        config.replicates = r;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    for o in &cli.overrides {
        config.apply_override(o)?;
    }
    config.validate()?;
    Ok(config)
}

fn print_summary(output: &ExperimentOutput) {
    for curve in &output.curves {
        match (&curve.fit, &curve.error) {
            (Some(fit), _) => eprintln!("curve {}: slope {:.4}, intercept {:.4}", curve.label, fit.slope, fit.intercept),
            (None, Some(e)) => eprintln!("curve {}: {e}", curve.label),
            _ => {}
        }
    }
    for check in &output.checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        eprintln!("{tag} {}: {}", check.name, check.detail);
    }
    for note in &output.notes {
        eprintln!("note: {note}");
    }
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let config = build_config(cli).map_err(|e| Failure::Config(e.into()))?;
    let started = Instant::now();
    let output = run(&config).map_err(|e| match e {
        Error::Config(_) | Error::Incompatible(_) | Error::InvalidParameter { .. } => Failure::Config(e.into()),
        other => Failure::Runtime(other.into()),
    })?;
    let elapsed = started.elapsed().as_secs_f64();
    info!("{} finished in {elapsed:.2}s", config.experiment);
    match &config.out {
        Some(path) => emit(&output, path, config.to_json(), elapsed)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Runtime)?,
        None => {
            let csv = output.table.to_csv_string().map_err(|e| Failure::Runtime(e.into()))?;
            print!("{csv}");
        }
    }
    print_summary(&output);
    Ok(output.all_passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(passed) if cli.check && !passed => ExitCode::from(3),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
