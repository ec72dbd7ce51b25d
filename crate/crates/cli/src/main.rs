use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use portal_core::harness::{self, ExperimentConfig, Preset};

#[derive(Parser)]
#[command(name = "portal-sim", version, about = "Simulate and analyse remote selection and docking studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a batch of participants and write logs, tables and a report.
    Run {
        /// Experiment config (TOML).
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Use a built-in preset instead of a config file.
        #[arg(long, value_parser = parse_preset)]
        preset: Option<Preset>,
        /// Output directory.
        #[arg(long, env = "PORTAL_SIM_OUT")]
        out: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the participant count.
        #[arg(long)]
        participants: Option<u32>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Re-analyse the trial log of a previous run.
    Report {
        #[arg(long = "in", env = "PORTAL_SIM_OUT")]
        input: PathBuf,
    },
    /// Validate and analyse an externally recorded trial log.
    Import {
        #[arg(long)]
        logs: PathBuf,
        /// Write analysis tables here as well as printing the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file and print its resolved form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

fn load(config: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_file(config).with_context(|| format!("invalid config {}", config.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            preset,
            out,
            seed,
            participants,
            parallel,
        } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => load(&path)?,
                (None, Some(p)) => ExperimentConfig::preset(p),
                (None, None) => unreachable!("clap enforces one of --config/--preset"),
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(n) = participants {
                cfg.participants = n;
            }
            cfg.validate()?;
            let sessions = harness::run_batch(&cfg, parallel)?;
            harness::write_outputs(&out, &cfg, &sessions)?;
            eprintln!(
                "{} participants, {} trial records -> {}",
                sessions.len(),
                sessions.iter().map(|s| s.logs.len()).sum::<usize>(),
                out.display()
            );
        }
        Command::Report { input } => print!("{}", harness::report_from_dir(&input)?),
        Command::Import { logs, out } => {
            let (sessions, report) = harness::import_and_analyze(&logs, out.as_deref())?;
            eprintln!("imported {} session(s) from {}", sessions.len(), logs.display());
            print!("{report}");
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("# sha256 {}", cfg.hash());
            print!("{}", cfg.to_toml_string());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
