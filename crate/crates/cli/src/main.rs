//! `kgh`: runs Klein-Gordon-Hartree experiments and inequality probes.
//!
//! Exit status: 0 success, 1 a declared gate failed, 2 invalid configuration
//! or input, 3 solver abort or divergence, 4 I/O failure.

// `!(x > 0.0)` is used throughout to reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;
mod plots;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgh_core::KghError;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] KghError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                KghError::SolverAbort { .. }
                | KghError::Divergence { .. }
                | KghError::NonFinite { .. } => 3,
                KghError::Io(_) | KghError::Csv(_) => 4,
                _ => 2,
            },
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "kgh",
    version,
    about = "Klein-Gordon-Hartree experiments and inequality probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run { config: PathBuf },
    /// Run a named preset, optionally patched with `section.key=value`.
    Preset {
        name: String,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the resolved configuration and exit.
        #[arg(long)]
        print: bool,
    },
    /// Write gnuplot scripts for a CSV report.
    Plots {
        report: PathBuf,
        /// Output directory; defaults to the report's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a config::ExperimentConfig,
    files: Vec<String>,
    gate_failures: &'a [String],
}

fn execute(cfg: &config::ExperimentConfig) -> Result<u8, CliError> {
    let outcome = experiments::run(cfg)?;
    let manifest = Manifest {
        config: cfg,
        files: outcome
            .files
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        gate_failures: &outcome.gate_failures,
    };
    let path = cfg.output.join("manifest.json");
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if outcome.gate_failures.is_empty() {
        Ok(0)
    } else {
        for g in &outcome.gate_failures {
            eprintln!("gate failed: {g}");
        }
        Ok(1)
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run { config } => execute(&config::load(&config)?),
        Command::Preset {
            name,
            overrides,
            print,
        } => {
            let mut value = config::preset(&name)?;
            for o in &overrides {
                config::apply_override(&mut value, o)?;
            }
            let cfg = config::from_value(value)?;
            if print {
                let text = serde_json::to_string_pretty(&cfg)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                println!("{text}");
                return Ok(0);
            }
            execute(&cfg)
        }
        Command::Plots { report, out } => {
            let out = out.unwrap_or_else(|| {
                report
                    .parent()
                    .map(|p| p.to_path_buf())
                    .unwrap_or_else(|| PathBuf::from("."))
            });
            for f in plots::emit_plots(&report, &out)? {
                println!("wrote {}", f.display());
            }
            Ok(0)
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("KGH_THREADS") {
        let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!("KGH_THREADS = `{raw}` is not a positive integer"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match init_threads().and_then(|_| dispatch(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
