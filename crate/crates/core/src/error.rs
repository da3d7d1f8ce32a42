use thiserror::Error;

use crate::fock::TwoModeState;

/// Errors raised by state construction, channels and measurements.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncated tail mass {tail:.3e} exceeds tolerance {tolerance:.3e} at n_max = {n_max}")]
    TailTooLarge { tail: f64, tolerance: f64, n_max: usize },

    #[error("state is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state is not Hermitian: max asymmetry {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    #[error("state trace {trace} differs from 1")]
    BadTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mixture weights sum to {sum}, expected 1")]
    BadWeights { sum: f64 },

    #[error("mixture has no terms")]
    EmptyMixture,

    #[error("atom amplitude beta is zero; tuning parameter is undefined")]
    DegenerateAtom,

    #[error("atom state is not normalized: |alpha|^2 + |beta|^2 = {norm}")]
    AtomNotNormalized { norm: f64 },

    #[error("inconsistent tuning: kappa {kappa} does not match alpha/(beta r) = {derived}")]
    InconsistentTuning { kappa: String, derived: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("seed coefficients are all zero")]
    DegenerateSeed,

    #[error("iteration did not converge after {iterations} steps (last distance {distance:.3e})")]
    NotConverged { iterations: usize, distance: f64, last: Box<TwoModeState> },

    #[error("two-level truncation invalid: A^2 <|gamma|^2> = {population} >= 1")]
    InvalidTruncation { population: f64 },

    #[error("mean amplitude <gamma> vanishes; states commute and cannot be discriminated unambiguously")]
    ZeroMeanAmplitude,

    #[error("states are identical (overlap {overlap}); unambiguous discrimination impossible")]
    StatesIdentical { overlap: f64 },

    #[error("numerical and closed-form results disagree: distance {distance:.3e} > {tolerance:.3e}")]
    Inconsistent { distance: f64, tolerance: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
