use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qemlab::engines::Backend;
use qemlab::{Method, RecoveryNoiseModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "qemlab", version, about = "PEC and feed-forward PEC experiments on Pauli-noise Clifford circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Insertion probabilities and sampling overheads over a rate grid.
    Tables(TablesArgs),
    /// Exact unmitigated expectation values.
    Noisy(ExperimentArgs),
    /// Exact infinite-shot values of the mitigated estimators.
    Analytic(ExperimentArgs),
    /// Monte Carlo sampling of the estimators.
    Sample(ExperimentArgs),
    /// Runs the command described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TablesArgs {
    /// Single-qubit error rates (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub p1: Vec<f64>,
    /// Two-qubit error rates (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub p2: Vec<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Benchmark `a`, `b`, `c` or a circuit file.
    #[arg(long, default_value = "a")]
    pub circuit: String,
    /// Register size for built-in benchmarks.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Layer count for built-in benchmarks.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Single-qubit error rates (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub p1: Vec<f64>,
    /// Two-qubit error rates (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub p2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "none,pec,ffpec")]
    pub method: Vec<MethodChoice>,
    /// Pauli observable such as `ZZZZZZZZ`; defaults to Z on every qubit.
    #[arg(long, allow_hyphen_values = true)]
    pub observable: Option<String>,
    /// Shots per batch.
    #[arg(long, default_value_t = crate::config::DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, default_value_t = crate::config::DEFAULT_BATCHES)]
    pub batches: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Clamp batch means to [-1, 1].
    #[arg(long)]
    pub clamp: bool,
    #[arg(long, value_enum, default_value_t = ModelChoice::NonIdentityOnly)]
    pub recovery_noise: ModelChoice,
    #[arg(long, value_enum, default_value_t = BackendChoice::Compiled)]
    pub backend: BackendChoice,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write gnuplot-ready `.dat` series.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    None,
    Pec,
    Ffpec,
}

impl MethodChoice {
    pub fn method(self) -> Option<Method> {
        match self {
            MethodChoice::None => None,
            MethodChoice::Pec => Some(Method::Pec),
            MethodChoice::Ffpec => Some(Method::Ffpec),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MethodChoice::None => "none",
            MethodChoice::Pec => "pec",
            MethodChoice::Ffpec => "ffpec",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    /// Recovery noise only on inserted (non-identity) recovery gates.
    NonIdentityOnly,
    /// Recovery noise on every branch, identity included.
    AllBranches,
}

impl From<ModelChoice> for RecoveryNoiseModel {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::NonIdentityOnly => RecoveryNoiseModel::NonIdentityOnly,
            ModelChoice::AllBranches => RecoveryNoiseModel::AllBranches,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Compiled,
    Frame,
}

impl From<BackendChoice> for Backend {
    fn from(b: BackendChoice) -> Self {
        match b {
            BackendChoice::Compiled => Backend::Compiled,
            BackendChoice::Frame => Backend::Frame,
        }
    }
}
