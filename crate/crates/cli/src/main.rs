#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;
use ruinwerk_cli::commands;
use ruinwerk_cli::error::{CliError, CliResult, EXIT_OK};
use ruinwerk_cli::output::{write_all_atomic, write_atomic};
use ruinwerk_cli::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "ruinwerk", version, about = "Survival probabilities of perturbed risk processes")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent (required by `simulate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `simulation.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimulateMode {
    Ladder,
    Ruin,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Survival curve by the series and by transform inversion.
    Survival,
    /// Exponent and transforms at given β values.
    Transform {
        /// Comma-separated β values; overrides `transform.beta`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        beta: Option<Vec<f64>>,
    },
    /// Simulate the dual process; writes a CSV and a summary JSON.
    Simulate {
        #[arg(long, value_enum, default_value = "ladder")]
        mode: SimulateMode,
        /// Summary path; defaults to the output path with extension `summary.json`.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the Monte Carlo check battery; exit 1 if any check fails.
    Validate {
        /// Force J₁ = L₀ before the independence test.
        #[arg(long)]
        inject_dependence: bool,
    },
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = cli.seed {
        cfg.simulation.seed = seed;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    }
    let mut cfg = load_config(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Survival => emit(out, &commands::cmd_survival(&cfg)?),
        Command::Transform { beta } => {
            let betas = beta.as_ref().unwrap_or(&cfg.transform.beta);
            emit(out, &commands::cmd_transform(&cfg.model, betas)?)
        }
        Command::Simulate { mode, summary } => {
            let out = out.ok_or_else(|| CliError::Config("simulate needs --out PATH".into()))?;
            let summary_path = summary.clone().unwrap_or_else(|| out.with_extension("summary.json"));
            let (table, json) = match mode {
                SimulateMode::Ladder => commands::cmd_simulate_ladder(&cfg)?,
                SimulateMode::Ruin => commands::cmd_simulate_ruin(&cfg)?,
            };
            write_all_atomic(&[(out, &table), (&summary_path, &json)])
        }
        Command::Validate { inject_dependence } => {
            cfg.validation.inject_dependence |= *inject_dependence;
            let (report, json) = commands::cmd_validate(&cfg)?;
            emit(out, &json)?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::ChecksFailed { failed: report.failed })
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RUINWERK_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            error!("{e}");
            eprintln!("ruinwerk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
