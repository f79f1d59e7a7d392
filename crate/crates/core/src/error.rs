use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit index {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("register size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("qubit {0} listed more than once")]
    RepeatedQubit(usize),
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("error rate {0} outside [0, 1)")]
    InvalidRate(f64),
    #[error("unsupported channel arity {0}")]
    UnsupportedArity(usize),
    #[error("expected {expected} error probabilities, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("error probabilities must be non-negative and sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuasiProbError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("noisy-inverse linear system is singular")]
    Singular,
    #[error("relative difference undefined for a zero reference probability")]
    ZeroReference,
    #[error("no noise bound for {0}-qubit gates")]
    UnboundNoise(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("benchmark circuits need an even qubit count >= 2, got {0}")]
    InvalidQubitCount(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("benchmark layout check failed: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    QuasiProb(#[from] QuasiProbError),
    #[error("dense simulation limited to {max} qubits, circuit has {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("shots and batches must both be at least 1")]
    EmptyRun,
    #[error("|mean| = {mean} exceeds gamma_tot = {gamma}")]
    Domain { mean: f64, gamma: f64 },
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
}
