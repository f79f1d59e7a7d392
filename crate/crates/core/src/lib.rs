//! Probabilistic error cancellation (PEC) and feed-forward PEC for Pauli noise.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`]: Pauli strings, Clifford gates and conjugation.
//! * [`channels`]: Pauli-diagonal noise channels, depolarizing as the built-in family.
//! * [`quasiprob`]: quasi-probability decompositions of inverse noise and their overheads.
//! * [`circuits`]: circuits, noise binding and the benchmark builders.
//! * [`engines`]: exact Heisenberg propagation, a dense oracle and the shot sampler.

pub mod channels;
pub mod circuits;
pub mod engines;
pub mod error;
pub mod pauli;
pub mod quasiprob;

pub use channels::PauliDiagonalChannel;
pub use circuits::{build_benchmark, BenchmarkKind, Circuit, GateCensus, NoiseBinding};
pub use engines::{EstimatorResult, SampleConfig};
pub use error::{ChannelError, CircuitError, EngineError, PauliError, QuasiProbError};
pub use pauli::{GateOp, Letter, PauliString};
pub use quasiprob::{Method, QuasiProbDecomposition, RecoveryNoiseModel};

/// Library version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
