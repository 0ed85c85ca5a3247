//! `fbm-ruin`: ruin experiments for reflected fractional Brownian motion.
//!
//! Exit codes: 0 success, 1 configuration error, 2 too few ruin events,
//! 3 internal error.

mod artifacts;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::artifacts::RunDir;
use crate::commands::{CompareMode, ConstantsMode, FieldMode};
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fbm-ruin", version, about = "Ruin experiments for reflected fractional Brownian motion")]
struct Cli {
    /// JSON configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo ruin probability with the matching asymptotic.
    RuinProb {
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Scaled conditional ruin times against their limit law.
    RuinTime {
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Scaled conditional maximum losses against Exp(1).
    Losses {
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Pickands and Piterbarg constant estimates.
    Constants {
        #[arg(value_enum)]
        mode: ConstantsMode,
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Variance landscape of the normalized field.
    Field {
        #[arg(value_enum)]
        mode: FieldMode,
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Monte Carlo against references along a ladder of surplus levels.
    Compare {
        #[arg(value_enum)]
        mode: CompareMode,
        #[command(flatten)]
        cfg: RunConfig,
    },
}

impl Command {
    /// Name used in the manifest and the default output directory.
    fn name(&self) -> String {
        use clap::ValueEnum;
        let mode = |v: clap::builder::PossibleValue| v.get_name().to_string();
        match self {
            Command::RuinProb { .. } => "ruin-prob".into(),
            Command::RuinTime { .. } => "ruin-time".into(),
            Command::Losses { .. } => "losses".into(),
            Command::Constants { mode: m, .. } => format!("constants-{}", mode(m.to_possible_value().expect("mode"))),
            Command::Field { mode: m, .. } => format!("field-{}", mode(m.to_possible_value().expect("mode"))),
            Command::Compare { mode: m, .. } => format!("compare-{}", mode(m.to_possible_value().expect("mode"))),
        }
    }

    fn flags(&mut self) -> RunConfig {
        match self {
            Command::RuinProb { cfg }
            | Command::RuinTime { cfg }
            | Command::Losses { cfg }
            | Command::Constants { cfg, .. }
            | Command::Field { cfg, .. }
            | Command::Compare { cfg, .. } => std::mem::take(cfg),
        }
    }

    fn run(&self, cfg: &mut RunConfig, dir: &mut RunDir) -> Result<String, CliError> {
        match *self {
            Command::RuinProb { .. } => commands::ruin_prob(cfg, dir),
            Command::RuinTime { .. } => commands::ruin_time(cfg, dir),
            Command::Losses { .. } => commands::losses(cfg, dir),
            Command::Constants { mode, .. } => commands::constants(mode, cfg, dir),
            Command::Field { mode, .. } => commands::field(mode, cfg, dir),
            Command::Compare { mode, .. } => commands::compare(mode, cfg, dir),
        }
    }
}

fn run(mut cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    }
    let name = cli.command.name();
    let flags = cli.command.flags();
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.overlay(flags);
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("fbm-ruin-out").join(&name));
    let mut dir = RunDir::create(&out)?;

    let outcome = cli.command.run(&mut cfg, &mut dir);
    let status = match &outcome {
        Ok(_) => "ok".to_string(),
        Err(e) => format!("failed: {e}"),
    };
    dir.write_config(&cfg)?;
    dir.finish(&name, cfg.seed, rayon::current_num_threads(), &status)?;
    let summary = outcome?;
    println!("{name}: {summary}");
    println!("artifacts in {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
