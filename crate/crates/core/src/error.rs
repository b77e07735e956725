use thiserror::Error;

use crate::lattice::Zone;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid needs at least 2 points per axis, got {0}")]
    GridTooSmall(usize),

    #[error("operation requires a {expected:?} grid, got {found:?}")]
    WrongZone { expected: Zone, found: Zone },

    #[error("hopping amplitudes must be non-negative, got ({0}, {1}, {2})")]
    NegativeAmplitude(f64, f64, f64),

    #[error("inconsistent characteristic-polynomial coefficients: {0}")]
    InconsistentCoefficients(String),

    #[error("k = ({0}, {1}) lies on a folded Dirac point; the phase is undefined there")]
    DiracPoint(f64, f64),

    #[error("elastic model is not coercive: F' never reaches {target} on [{lo}, {hi}]")]
    NotCoercive { target: f64, lo: f64, hi: f64 },

    #[error("predicate is not monotone across [{lo}, {hi}]")]
    NotMonotone { lo: f64, hi: f64 },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
