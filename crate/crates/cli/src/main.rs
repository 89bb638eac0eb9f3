//! `cantor-nest`: batch front end for building Cantor sets, analyzing them and
//! certifying how much room there is to translate one inside another.
//!
//! Exit codes: 0 success or certified-positive, 1 error, 2 indeterminate,
//! 3 certified violation, 4 an uncertifiable quantity was requested.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: cantor_nest::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

/// Attaches command-line context to library errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for cantor_nest::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: what(),
            source,
        })
    }
}

#[derive(Parser)]
#[command(name = "cantor-nest", version, about = "Certified bounds for translating one Cantor set inside another")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Each also has a config-file key of the same name.
#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// Report path (JSON); printed to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV path; defaults to the report path with a .csv extension.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// JSON object of option values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dyadic rounding exponent: published values lie on the grid 2^-precision.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Construction depth for covers of K.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Use only the first N gaps.
    #[arg(long, global = true)]
    pub gaps: Option<usize>,
    /// Use only gaps up to this construction level.
    #[arg(long, global = true)]
    pub levels: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a registered construction and write it in the set-exchange format.
    Build(commands::BuildArgs),
    /// Exponent of convergence, (C_p) partial sums, C_K certificate and dimension.
    Analyze(commands::AnalyzeArgs),
    /// Bound and oracles for translating K inside K̃.
    Nest(commands::NestArgs),
    /// Evaluate the bound for λK over a geometric grid of λ.
    Scan(commands::ScanArgs),
    /// Diophantine lower bound sweep over q0, with an optional oracle run.
    Dio(commands::DioArgs),
    /// Sequence-count tables and the counting-lemma checks.
    Comb(commands::CombArgs),
    /// Seeded random counterexample trend study.
    RandomCe(commands::RandomCeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => commands::build(&cli.common, a),
        Command::Analyze(a) => commands::analyze(&cli.common, a),
        Command::Nest(a) => commands::nest(&cli.common, a),
        Command::Scan(a) => commands::scan(&cli.common, a),
        Command::Dio(a) => commands::dio(&cli.common, a),
        Command::Comb(a) => commands::comb(&cli.common, a),
        Command::RandomCe(a) => commands::random_ce(&cli.common, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
