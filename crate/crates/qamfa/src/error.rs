use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no witness: {input:?} is not a member of {protocol}")]
    NoWitness { protocol: String, input: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("diverging chain: node {node} has no path to an absorbing class")]
    DivergingChain { node: String },

    #[error("non-halting: per-iteration accept and reject probabilities are both zero")]
    NonHalting,

    #[error("protocol violation: prover answered {response:?} at state {state}, outside the communication alphabet")]
    ProtocolViolation { state: String, response: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid machine: {0} violation(s), first: {1}")]
    InvalidMachine(usize, String),

    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
