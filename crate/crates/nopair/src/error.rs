//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by lattice construction, density-matrix validation,
/// the solvers and the verifier.
#[derive(Debug, Error)]
pub enum NopairError {
    #[error("grid points per axis must be even, got {0}")]
    OddGrid(usize),

    #[error("grid points per axis must be at least 4, got {0}")]
    GridTooSmall(usize),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("fields live on different boxes or representations: {0}")]
    BoxMismatch(&'static str),

    #[error("nuclei {0} and {1} coincide")]
    CoincidentNuclei(usize, usize),

    #[error("occupation {index} is negative: {value}")]
    NegativeOccupation { index: usize, value: f64 },

    #[error("orbital {index} violates the free picture: |(1-P0) xi| = {defect:.3e}")]
    PictureViolation { index: usize, defect: f64 },

    #[error("occupation/orbital counts differ: {occupations} vs {orbitals}")]
    CountMismatch { occupations: usize, orbitals: usize },

    #[error("kinetic budget must be non-negative, got {0}")]
    InfeasibleBudget(f64),

    #[error("lattice point {0:?} outside the {1}^3 grid")]
    PointOutsideLattice([usize; 3], usize),

    #[error("coupling out of range for {check}: {detail}")]
    CouplingOutOfRange { check: &'static str, detail: String },

    #[error("eigensolver did not converge within {iterations} iterations (residual {residual:.3e})")]
    EigensolverFailure { iterations: usize, residual: f64 },

    #[error("pair basis too small: rank {rank} density matrix needs {needed} one-particle states, have {have}")]
    PairBasisTooSmall { rank: usize, needed: usize, have: usize },

    #[error("sub-basis size must be at least 16, got {0}")]
    SubBasisTooSmall(usize),

    #[error("unknown check name: {0}")]
    UnknownCheck(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}
