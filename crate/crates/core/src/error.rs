use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("map is not simplicial; offending simplices: {}", .0.join(", "))]
    NotSimplicial(Vec<String>),
    #[error("empty input")]
    EmptyInput,
    #[error("not contractible: {0}")]
    NotContractible(String),
    #[error("cannot construct controlled family over simplex {simplex}: {reason}")]
    CannotConstruct { simplex: String, reason: String },
    #[error("Γ_ε inversion failed: {0}")]
    InversionFailure(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("precondition mismatch: {0}")]
    Mismatch(String),
    #[error("unsupported dimension {0} (at most 2 supported)")]
    UnsupportedDimension(usize),
    #[error("retraction is vacuous: preimage of the open simplex {0} is empty")]
    VacuousRetraction(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
