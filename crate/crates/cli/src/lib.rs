//! Command-line front end: argument definitions and dispatch.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qudit_epp::hashing::DeltaPolicy;
use qudit_epp::{PresetKind, Protocol};

mod commands;
pub mod output;
pub mod ranges;

pub use output::{fmt_num, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
        }
    }
}

impl From<qudit_epp::Error> for CliError {
    fn from(e: qudit_epp::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qudit-epp", version, about = "Entanglement purification of qudit systems")]
pub struct Cli {
    /// Output path; `-` writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Output format (default: json for oracle-check, csv otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate a recurrence protocol and print the fidelity trajectory.
    RecurrenceRun(RecurrenceArgs),
    /// Yield needed to reach a target fidelity over a grid of inputs.
    Yields(YieldArgs),
    /// Noise thresholds and purification regimes per dimension.
    Thresholds(ThresholdArgs),
    /// Hashing yields, finite-size bounds, thresholds and the parity lemma.
    Hashing(HashingArgs),
    /// Multipartite (GHZ) hashing yields.
    Ghz(GhzArgs),
    /// Compare coefficient maps with dense density-matrix simulation.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Local dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Input family.
    #[arg(long, default_value = "isotropic")]
    pub preset: PresetKind,
    /// Initial fidelity.
    #[arg(long = "F", visible_alias = "fidelity")]
    pub fidelity: Option<f64>,
    /// Share of X-type errors for `xz_mixture`.
    #[arg(long)]
    pub x_weight: Option<f64>,
    /// JSON state file; replaces --d/--preset/--F.
    #[arg(long, conflicts_with_all = ["d", "fidelity"])]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value = "p1p2")]
    pub protocol: Protocol,
    /// Gate retention Q.
    #[arg(long = "Q", visible_alias = "gate", default_value_t = 1.0)]
    pub gate: f64,
    /// Transmission retention p applied to both qudits of every input pair.
    #[arg(long = "p", visible_alias = "transmission", default_value_t = 1.0)]
    pub transmission: f64,
    /// Stop at F >= 1 - epsilon.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    /// Stop at this fidelity instead of 1 - epsilon.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct YieldArgs {
    /// Dimensions: `5`, `2,3,5`, `2..7` or `primes:2..11`.
    #[arg(long, default_value = "5")]
    pub d: String,
    #[arg(long, value_delimiter = ',', default_value = "p1p2")]
    pub protocol: Vec<Protocol>,
    #[arg(long, value_delimiter = ',', default_value = "isotropic")]
    pub preset: Vec<PresetKind>,
    /// Initial fidelities: list or start:stop:step.
    #[arg(long = "F", visible_alias = "fidelity", default_value = "0.5:0.95:0.05")]
    pub fidelity: String,
    #[arg(long)]
    pub x_weight: Option<f64>,
    #[arg(long = "Q", visible_alias = "gate", default_value_t = 1.0)]
    pub gate: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value = "bbpssw")]
    pub protocol: Protocol,
    /// Dimensions: list, `a..b` or `primes:a..b`.
    #[arg(long = "d", visible_alias = "d-range", default_value = "2..40")]
    pub d: String,
    /// Input family for numeric scans.
    #[arg(long, default_value = "isotropic")]
    pub kind: PresetKind,
    /// Also report the purification regime at these gate retentions.
    #[arg(long = "Q", visible_alias = "gate")]
    pub gate: Option<String>,
    /// Use the numeric scan even where a closed form exists.
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Debug, Args)]
pub struct HashingArgs {
    /// Dimensions (prime): `5`, `2,3`, `primes:2..97`.
    #[arg(long = "d", visible_alias = "d-range", default_value = "2")]
    pub d: String,
    /// Minimum fidelity table (F_min, p_min, q_min, universal threshold).
    #[arg(long)]
    pub fmin: bool,
    /// Same table as --fmin.
    #[arg(long)]
    pub threshold: bool,
    /// Monte Carlo estimate of the random-subset parity collision rate.
    #[arg(long)]
    pub lemma1: bool,
    /// Yield of measurement-based hashing under transmission/resource noise.
    #[arg(long)]
    pub noisy: bool,
    /// Fidelities: list or start:stop:step.
    #[arg(long = "F", visible_alias = "fidelity")]
    pub fidelity: Option<String>,
    /// Pair counts: `n`, `lo:hi` or `lo:hi:step`.
    #[arg(long, visible_alias = "n")]
    pub n_sweep: Option<String>,
    /// `fixed:<delta>`, `npow:<exponent>` or `n_to_1`.
    #[arg(long, default_value = "npow:-0.25")]
    pub delta: DeltaPolicy,
    /// String length parameter for --lemma1 (strings live in Z_d^(2n)).
    #[arg(long, default_value_t = 8)]
    pub pairs: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Transmission retentions for --noisy.
    #[arg(long = "p", default_value = "1")]
    pub transmission: String,
    /// Resource retentions for --noisy.
    #[arg(long = "q", default_value = "0.85:1:0.005")]
    pub resource: String,
}

#[derive(Debug, Args)]
pub struct GhzArgs {
    /// Dimensions (prime).
    #[arg(long = "d", visible_alias = "d-range", default_value = "2")]
    pub d: String,
    /// Party counts: list or range.
    #[arg(long = "N", visible_alias = "parties", default_value = "3")]
    pub parties: String,
    #[arg(long = "F", visible_alias = "fidelity", default_value = "0.8:1:0.01")]
    pub fidelity: String,
    /// JSON GHZ state file; replaces the grid.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value = "2,3")]
    pub d: String,
    /// Random states per dimension and map.
    #[arg(long, default_value_t = 50)]
    pub states: usize,
}

/// Runs a parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    commands::dispatch(cli)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let text = execute(cli)?;
    output::emit(&text, &cli.output)
}
