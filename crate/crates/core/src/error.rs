use thiserror::Error;

use crate::ring::BaseRing;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base ring: {0}")]
    InvalidBase(String),
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(BaseRing, BaseRing),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("valuation is indeterminate at the available precision")]
    Indeterminate,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("quotient module is not free over the base: {0}")]
    NonFreeQuotient(String),
    #[error("invalid ramification: {0}")]
    InvalidRamification(String),
    #[error("cell is not in normalized form: {0}")]
    NormalizationRequired(String),
    #[error("not a lattice pair: {0}")]
    InvalidLatticePair(String),
    #[error("cohomology did not stabilize within {0} truncation steps")]
    NonConvergent(usize),
    #[error("point is not Q-rational: {0}")]
    NonRationalPoint(String),
    #[error("admissibility violation: {0}")]
    AdmissibilityViolation(String),
    #[error("forms have different reductions mod nilpotents")]
    ReductionMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::InsufficientPrecision(_) | Error::Indeterminate)
    }
}
