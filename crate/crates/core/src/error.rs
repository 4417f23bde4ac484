use alloc::string::String;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("memory bound: contraction width {width} exceeds cap {cap}")]
    WidthCapExceeded { width: usize, cap: usize },
    #[error("dense simulation of {qubits} qubits refused (limit {limit})")]
    TooLarge { qubits: usize, limit: usize },
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("invalid elimination order: {0}")]
    InvalidOrder(String),
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error("trace sample store is empty")]
    EmptyStore,
    #[error("invalid trace sample: {0}")]
    InvalidSample(String),
    #[error("invalid termination policy: {0}")]
    InvalidPolicy(String),
    #[error("fit region has {found} points, need at least {needed}")]
    FitRegion { found: usize, needed: usize },
    #[error("non-positive deviation {0} cannot be log-fitted")]
    NonPositiveDeviation(f64),
    #[error("fit did not converge (non-decaying curve)")]
    NotConverged,
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { found: usize, needed: usize },
    #[error("degenerate regression: all abscissae equal")]
    DegenerateRegression,
    #[error("missing data point: all {0} bootstrap replicates failed")]
    AllReplicatesFailed(usize),
    #[error("{samples} samples cannot be split into {parts} partitions")]
    TooFewSamples { samples: usize, parts: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
