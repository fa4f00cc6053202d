//! Exact computation of de Rham epsilon lines.
//!
//! Lattices in `A((t))^r`, their relative graded determinants, good lattice
//! pairs for formal connections in Levelt-Turrittin form, local epsilon
//! lines, the product formula for rank-one connections on the projective
//! line, and the crystal structure of epsilon lines over
//! `A = Q[eps]/(eps^N)`.
//!
//! All arithmetic is exact. Series carry an explicit precision and any
//! operation that would need unknown coefficients fails with
//! [`Error::InsufficientPrecision`].

pub mod connection;
pub mod curve;
pub mod error;
pub mod family;
pub mod graded_line;
pub mod lattice;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod ring;
pub mod series;

pub use connection::{FormalConnection, LTCell, LatticePair};
pub use curve::{GlobalLatticeData, GlobalRank1Connection, Point};
pub use error::{Error, Result};
pub use family::{FamilyForm, TwistUnit};
pub use graded_line::TrivializedGradedLine;
pub use lattice::Lattice;
pub use ring::{BaseRing, Rational, RingElem};
pub use series::LaurentSeries;

/// Default relative working precision for series that must be truncated.
pub const DEFAULT_PRECISION: i64 = 24;

/// Run `f` at `prec`; on a precision failure retry once at `2 * prec`.
pub fn with_precision_retry<T>(prec: i64, f: impl Fn(i64) -> Result<T>) -> Result<T> {
    match f(prec) {
        Err(e) if e.is_precision() => f(2 * prec),
        other => other,
    }
}
