//! Error type shared across the crate.
//!
//! Constructors and validating entry points return `Result`; pure math
//! operations whose preconditions are programmer contracts (matching grids,
//! nonnegative moduli) panic instead, like the shape checks in the usual
//! array crates.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dim must be 1, 2, or 3 (got {0})")]
    InvalidDim(usize),

    #[error("half_extent must be positive and finite (got {0})")]
    InvalidHalfExtent(f64),

    #[error("points_per_axis must be a power of two >= 8 (got {0})")]
    InvalidPointsPerAxis(usize),

    #[error("gamma must exceed 1 (got {0})")]
    InvalidGamma(f64),

    #[error("omega must be finite (got {0})")]
    InvalidOmega(f64),

    #[error("reg_index must be a positive integer (got {0})")]
    InvalidRegIndex(u64),

    #[error("field length {got} does not match grid ({expected} points)")]
    WrongLength { expected: usize, got: usize },

    #[error("field contains a non-finite value at flat index {0}")]
    NonFiniteValue(usize),

    #[error("dt must be positive (got {0})")]
    InvalidDt(f64),

    #[error("t_final must be positive and >= dt (got {0})")]
    InvalidHorizon(f64),

    #[error("record_every must be >= 1")]
    InvalidRecordEvery,

    #[error("step sizes must be finite, positive, and strictly decreasing")]
    InvalidDtList,

    #[error("need at least {min} step sizes (got {got})")]
    TooFewDts { min: usize, got: usize },

    #[error("perturbation sizes must be finite, nonnegative, and sorted ascending")]
    InvalidDeltas,

    #[error("non-finite value detected during evolution; last finite time t = {last_finite_time}")]
    NonFinite { last_finite_time: f64 },
}
