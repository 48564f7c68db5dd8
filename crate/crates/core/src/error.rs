use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation requires a finite field")]
    UnsupportedField,
    #[error("resource bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("representation has no framing (r = 0)")]
    NoFraming,
    #[error("invalid subrepresentation pair: {0}")]
    InvalidPair(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("condition (S2) is undecidable over the rationals; supply a certificate")]
    NeedsS2Certificate,
    #[error("representation is not semistable")]
    NotSemistable,
    #[error("representation does not satisfy (S2)")]
    NotS2,
    #[error("plane data is not stable")]
    NotStable,
    #[error("zero representation has no slope")]
    ZeroRepresentation,
    #[error("invalid Chern data: {0}")]
    InvalidChernData(String),
    #[error("triple does not satisfy (S0)")]
    NotS0Stable,
    #[error("point does not lie on the blown-up plane")]
    InvalidPoint,
    #[error("malformed input: {0}")]
    MalformedInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
