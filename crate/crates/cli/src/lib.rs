//! Experiment runner behind the `qpke-lab` binary.
//!
//! Exit status: 0 when every built-in check passes, 1 when one fails, 2 on a
//! configuration or capacity error (including argument errors).

pub mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qpke_core::games::GameKind;
use qpke_core::primitives::{Instantiation, SkeMode};
use qpke_core::schemes::{Mutation, SchemeConfig, SchemeKind};

pub use report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "qpke-lab", version, about = "Simulate and attack quantum public-key encryption schemes at small sizes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// State-vector qubit limit (1..=30, default 20).
    #[arg(long, global = true, env = "QPKE_QMAX")]
    pub qmax: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Round-trip success rates (exhaustive where feasible).
    Correctness {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Estimate an adversary's winning probability in a security game.
    Game {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value = "cpa")]
        game: GameKind,
        /// Built-in adversary (see the README for the list).
        #[arg(long, default_value = "random-guess")]
        adversary: String,
        /// Confidence level of the reported interval.
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        /// Key copies and encryption queries per phase.
        #[arg(long, default_value_t = qpke_core::games::DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact hybrid and Helstrom computations.
    Analyze {
        #[arg(value_enum)]
        what: Analysis,
        #[arg(long, default_value = "owf")]
        scheme: SchemeKind,
        /// Restrict to one λ (default: the standard range for the analysis).
        #[arg(long)]
        lambda: Option<usize>,
        /// Restrict to one number of key copies.
        #[arg(long)]
        copies: Option<usize>,
        /// Encryption queries for `random-key`.
        #[arg(long)]
        queries: Option<usize>,
        /// PRFS output qubits for `helstrom`.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    /// Full vs. punctured key copies, closed form against explicit states.
    Punctured,
    /// Measurement-order independence of the encryptor's and adversary's copies.
    Commuting,
    /// Pad key `H(x*)` vs. a fresh uniform key.
    RandomKey,
    /// Optimal distinguishing advantage from exact ensembles.
    Helstrom,
}

#[derive(Clone, Debug, Args)]
pub struct SchemeArgs {
    /// owf | prfspd | prfs
    #[arg(long, default_value = "owf")]
    pub scheme: SchemeKind,
    #[arg(long, default_value_t = 4)]
    pub lambda: usize,
    /// PRFS output qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// PRFSPD measured width.
    #[arg(long)]
    pub m: Option<usize>,
    /// PRFSPD tag width (default λ).
    #[arg(long)]
    pub tag_width: Option<usize>,
    /// prf | random-table
    #[arg(long, default_value = "prf")]
    pub instantiation: Instantiation,
    /// prf-pad | fixed-nonce | one-time-pad
    #[arg(long, default_value = "prf-pad", value_parser = parse_ske)]
    pub ske: SkeMode,
    /// Deliberately broken primitive (none, keyless-prf, fixed-nonce, ...).
    #[arg(long, default_value = "none")]
    pub mutation: Mutation,
}

impl SchemeArgs {
    pub fn config(&self) -> Result<SchemeConfig> {
        let mut c = SchemeConfig::new(self.scheme, self.lambda)
            .with_instantiation(self.instantiation)
            .with_ske(self.ske)
            .with_mutation(self.mutation);
        if let Some(n) = self.n {
            c = c.with_n(n);
        }
        if let Some(m) = self.m {
            c.m = m;
        }
        if let Some(t) = self.tag_width {
            c.t = t;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_ske(s: &str) -> std::result::Result<SkeMode, String> {
    match s {
        "prf-pad" => Ok(SkeMode::PrfPad),
        "fixed-nonce" => Ok(SkeMode::FixedNonce),
        "one-time-pad" => Ok(SkeMode::OneTimePad),
        _ => Err(format!("unknown SKE mode {s:?}")),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Scheme(#[from] qpke_core::schemes::SchemeError),
    #[error(transparent)]
    Game(#[from] qpke_core::games::GameError),
    #[error(transparent)]
    Analysis(#[from] qpke_core::analysis::AnalysisError),
    #[error(transparent)]
    Primitive(#[from] qpke_core::primitives::PrimitiveError),
    #[error(transparent)]
    Qsim(#[from] qpke_core::qsim::QsimError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Correctness { scheme, run } => commands::correctness(&scheme.config()?, run),
        Command::Game { scheme, game, adversary, confidence, budget, run } => {
            commands::game(&scheme.config()?, *game, adversary, *confidence, *budget, run)
        }
        Command::Analyze { what, scheme, lambda, copies, queries, n } => {
            commands::analyze(*what, *scheme, *lambda, *copies, *queries, *n)
        }
    }
}
