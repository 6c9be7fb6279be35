//! Library error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not Hermitian: max |H[j][k] - conj(H[k][j])| = {deviation:e} exceeds {tolerance:e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },

    #[error("basis vector {index} is linearly dependent (residual {residual:e} after orthogonalization)")]
    LinearlyDependentBasis { index: usize, residual: f64 },

    #[error("kets must be nonzero and of the ambient dimension")]
    InvalidKet,

    #[error("subspaces are not mutually orthogonal: |<b|b'>| = {overlap:e} between subspaces {first} and {second}")]
    NonOrthogonalFamily {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("operation requires a single-subspace projection map; the range of an orthogonal-family map is block-diagonal")]
    UnsupportedKind,

    #[error("solver stalled: {detail}")]
    SolverStall { detail: String },

    #[error("assessment is inconsistent: it incurs a sure loss")]
    InconsistentAssessment,

    #[error("conditioning exposed a conflict: the reduced assessment is inconsistent")]
    ReducedInconsistent,

    #[error("values do not determine a density operator: {detail}")]
    NotADensity { detail: String },

    #[error("prevision values missing for basis element {label}")]
    IncompleteBasis { label: String },

    #[error(
        "conditioning event has upper probability {mass:e} at or below the threshold {threshold:e}"
    )]
    ZeroProbabilityEvent { mass: f64, threshold: f64 },

    #[error("the assessment admits no dominating density operator (empty credal set)")]
    EmptyCredalSet,
}

pub type Result<T> = std::result::Result<T, Error>;
