//! Command-line front end: argument definitions and command dispatch.
//!
//! [`run`] does all the work and returns the text to print together with
//! the exit status, so commands can be exercised without spawning a
//! process.

mod commands;
mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "liquid-influence", version, about = "Voting power in liquid-democracy delegation graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GlobalArgs {
    /// Uniform voting probability (a comma separated grid for `table`)
    #[arg(long = "p", global = true, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Per-agent probabilities: JSON object or `agent,p` lines
    #[arg(long, global = true)]
    pub prob_file: Option<PathBuf>,
    /// Issue to consolidate scoped delegations for
    #[arg(long, global = true)]
    pub issue: Option<String>,
    /// Monte Carlo seed
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Monte Carlo sample count
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Convergence tolerance for power iteration
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Iteration cap for power iteration
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_iters: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Run on a single thread (output is identical either way)
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential, expected and stationary weight for every agent
    Analyze {
        /// Graph file (JSON document or edge list) or bundled graph name
        graph: String,
    },
    /// Compare first-passage weight against exact enumeration
    Oracle {
        graph: String,
        /// Agent to check; all agents when omitted
        #[arg(long)]
        target: Option<String>,
    },
    /// Monte Carlo estimate of one agent's expected weight
    Sample {
        graph: String,
        #[arg(long)]
        target: String,
    },
    /// Closed-form expected weight tables for chains and stars
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        /// Chain lengths (number of delegators)
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Star sizes (number of direct delegators)
        #[arg(long, value_delimiter = ',')]
        k: Vec<u64>,
    },
    /// Stationary weight distribution, analytic and by power iteration
    Stationary { graph: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    ChainLimit,
    Chain,
    Star,
}

/// Text for stdout plus the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub status: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, status: 0 }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    commands::dispatch(cli)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<Output, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli)
}
