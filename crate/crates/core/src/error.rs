use thiserror::Error;

use crate::circuit::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit circuit (gate {gate})")]
    QubitOutOfRange { gate: usize, qubit: usize, n_qubits: usize },
    #[error("malformed gate {gate}: {message}")]
    MalformedGate { gate: usize, message: String },
    #[error("circuit is not in practical form: {0}")]
    NotPractical(ValidationReport),
    #[error("{what} supports at most {max} qubits, got {got}")]
    TooLarge { what: &'static str, max: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("lattice has {sites} sites but the circuit needs {needed}")]
    Capacity { sites: usize, needed: usize },
    #[error("routing failed: {0}")]
    Routing(String),
    #[error("ill-formed sequence: {0}")]
    IllFormed(String),
    #[error("internal scheduling error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
