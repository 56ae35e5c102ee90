//! `diskfield`: runs one experiment and writes its result files.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or the
//! computation errors, 2 on a usage error.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{load_config_file, Experiment, ExperimentConfig, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Numeric(#[from] diskfield::Error),
    #[error("serialisation: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Numeric(diskfield::Error::InvalidArgument(_)) => 2,
            _ => 1,
        }
    }
}

/// Numerical experiments on the Ginibre characteristic-polynomial field.
#[derive(Debug, Parser)]
#[command(name = "diskfield", version, after_help = experiment_list())]
struct Cli {
    /// Experiment to run.
    #[arg(value_name = "EXPERIMENT", conflicts_with = "experiment_flag")]
    experiment: Option<String>,

    /// Experiment to run (alternative to the positional form).
    #[arg(short = 'e', long = "experiment", value_name = "NAME")]
    experiment_flag: Option<String>,

    /// TOML file of settings; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,
}

fn experiment_list() -> String {
    let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
    format!("Experiments: {}", names.join(", "))
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let file = cli.config.as_deref().map(load_config_file).transpose()?;
    let named = cli.experiment.or(cli.experiment_flag);
    let experiment = match (named, file.as_ref().and_then(|f| f.experiment)) {
        (Some(name), _) => name.parse()?,
        (None, Some(e)) => e,
        (None, None) => return Err(CliError::Usage(format!("no experiment given. {}", experiment_list()))),
    };
    ExperimentConfig::resolve(experiment, cli.overrides, file.map(|f| f.overrides).unwrap_or_default())
}

fn run(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    if cfg.workers > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    }
    let start = Instant::now();
    let outcome = experiments::run(cfg)?;
    let files = output::write_all(cfg, &outcome, start.elapsed().as_secs_f64())?;

    for c in &outcome.checks {
        let target = match c.tolerance {
            Some(t) => format!("{:.6e} ± {t:.2e}", c.target),
            None => format!("bound {:.6e}", c.target),
        };
        println!("{} {}: {:.6e} ({target})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.observed);
    }
    let passed = outcome.checks.iter().filter(|c| c.pass).count();
    println!("{}: {passed}/{} checks passed in {:.1} s", cfg.experiment, outcome.checks.len(), start.elapsed().as_secs_f64());
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = resolve(cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
