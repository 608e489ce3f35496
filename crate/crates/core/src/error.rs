//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("cannot raise a {degree}-form in dimension {dim}: target space is trivial")]
    DegreeTooHighForD { degree: usize, dim: usize },

    #[error("cannot lower a 0-form: there is no (-1,0)-form space")]
    DegreeZeroForDStar,

    #[error("form degree mismatch: expected {expected}, found {found}")]
    FormDegreeMismatch { expected: usize, found: usize },

    #[error("expression contains derivative operators and is not a polynomial")]
    NotAPolynomial,

    #[error("expression is not a constant-coefficient differential operator")]
    NotADiffOperator,

    #[error("symbol degree {found} exceeds maximum {max} required here")]
    DegreeTooHigh { max: u32, found: u32 },

    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,

    #[error("cutoff {cutoff} too small: data requires at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("condition verdict did not pass; decomposition is not defined")]
    VerdictNotPassed,

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("invalid JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
