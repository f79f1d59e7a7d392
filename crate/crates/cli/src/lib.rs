//! Command-line front end for `qemlab`.
//!
//! The binary is a thin wrapper: argument structs live in [`args`], validated experiment
//! settings in [`config`], and every subcommand is a function in [`commands`] returning
//! the paths it wrote. Tests drive the same functions directly.

pub mod args;
pub mod commands;
pub mod config;
pub mod format;

use std::path::PathBuf;

use qemlab::{CircuitError, EngineError, QuasiProbError};
use thiserror::Error;

pub use args::{Cli, Command};
pub use config::{CircuitSpec, CommandKind, ExperimentConfig, TablesConfig};

/// Environment variable capping the sampler's worker threads.
pub const THREADS_ENV: &str = "QEMLAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<QuasiProbError> for CliError {
    fn from(e: QuasiProbError) -> Self {
        match e {
            QuasiProbError::Singular | QuasiProbError::ZeroReference => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::QuasiProb(q) => q.into(),
            EngineError::Domain { .. } | EngineError::ThreadPool(_) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Reads the thread cap from the environment. Unset means "use all cores".
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Runs one parsed command and returns the files it wrote.
pub fn execute(command: Command, threads: Option<usize>) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Tables(a) => commands::tables(&TablesConfig::from_args(&a)?),
        Command::Noisy(a) => commands::noisy(&ExperimentConfig::from_args(&a)?),
        Command::Analytic(a) => commands::analytic(&ExperimentConfig::from_args(&a)?),
        Command::Sample(a) => commands::sample(&ExperimentConfig::from_args(&a)?, threads),
        Command::Run { config } => {
            let (kind, cfg) = config::load(&config)?;
            match kind {
                CommandKind::Tables => commands::tables(&cfg.tables()?),
                CommandKind::Noisy => commands::noisy(&cfg),
                CommandKind::Analytic => commands::analytic(&cfg),
                CommandKind::Sample => commands::sample(&cfg, threads),
            }
        }
    }
}
