use thiserror::Error;

use crate::qstate::Label;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit labels must be distinct and disjoint, got {0:?}")]
    Labeling(Vec<Label>),
    #[error("label lists differ: {left:?} vs {right:?}")]
    LabelMismatch { left: Vec<Label>, right: Vec<Label> },
    #[error("label {0} is not part of the state")]
    UnknownLabel(Label),
    #[error("{0} qubits requested, at most {max} supported", max = crate::qstate::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("basis is not orthonormal (max Gram deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("not a valid density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("impossible outcome {outcome}: probability {probability:e}")]
    ImpossibleOutcome { outcome: usize, probability: f64 },
    #[error("outcome {outcome} out of range for a {count}-outcome measurement")]
    OutcomeOutOfRange { outcome: usize, count: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
