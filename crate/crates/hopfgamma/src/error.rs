//! Error taxonomy shared by all modules.
//!
//! Two kinds are special for callers: [`Error::TheoremViolation`] and
//! [`Error::InternalInconsistency`] indicate that a structural guarantee
//! failed on input that passed validation, i.e. an implementation bug.
//! Everything else reports a defect in the data handed to us.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scalar: {0}")]
    InvalidScalar(String),

    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),

    #[error("shape error: {0}")]
    ShapeError(String),

    #[error("not an associative unital algebra: {0}")]
    NotAnAlgebra(String),

    #[error("incomplete datum: {0}")]
    IncompleteDatum(String),

    #[error("invalid datum: {0}")]
    InvalidDatum(String),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("invalid subobject: {0}")]
    InvalidSubobject(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("datum mismatch: {0}")]
    DatumMismatch(String),

    #[error("monomial outside the admissible basis: {0}")]
    NotInBasis(String),

    #[error("support not closed for the requested checks: {0}")]
    SupportError(String),

    #[error("memory budget exceeded after {completed} radii (partial sizes: {partial:?})")]
    BudgetExceeded { completed: usize, partial: Vec<u64> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    ParseError(String),

    /// A statement the construction guarantees failed to hold. Always a bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    /// Two independent routes to the same fact disagreed. Always a bug.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// True for the variants that indicate an implementation bug rather
    /// than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::TheoremViolation(_) | Error::InternalInconsistency(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
