use alloc::string::String;

/// Errors raised by constructors and numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("operator is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operator trace is {trace}, expected 1")]
    TraceMismatch { trace: f64 },
    #[error("POVM has no effects")]
    EmptyPovm,
    #[error("effects do not resolve the identity (residual {residual:e})")]
    NotResolvingIdentity { residual: f64 },
    #[error("expected {expected} effects, found {found}")]
    WrongEffectCount { expected: usize, found: usize },
    #[error("operators are linearly dependent (min Gram eigenvalue {min_eigenvalue:e})")]
    GramRankDeficient { min_eigenvalue: f64 },
    #[error("effect weights sum to {sum}, expected {expected}")]
    WeightSumMismatch { sum: f64, expected: f64 },
    #[error("vector is not a SIC fiducial (residual {residual:e})")]
    NotAFiducial { residual: f64 },
    #[error("fiducial vector is not unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },
    #[error("no registered fiducial for dimension {0}")]
    UnknownDimension(usize),
    #[error(
        "fiducial search failed after {restarts} restarts (best objective {best_objective:e})"
    )]
    SearchFailed {
        restarts: usize,
        best_objective: f64,
    },
    #[error("ill-conditioned reference process: post-measurement states are linearly dependent (min Gram eigenvalue {min_eigenvalue:e})")]
    DependentPostStates { min_eigenvalue: f64 },
    #[error("ill-conditioned matrix inverse (condition number {condition_number:e})")]
    IllConditioned { condition_number: f64 },
    #[error("effect {index} is zero")]
    ZeroEffect { index: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("vector does not sum to 1 (sum {sum})")]
    NotNormalizable { sum: f64 },
    #[error("probability entry {index} is negative ({value:e})")]
    NegativeProbability { index: usize, value: f64 },
    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("entry {index} is not strictly positive ({value:e})")]
    NonPositiveEntry { index: usize, value: f64 },
    #[error("operator {index} is not normalized (tr P^2 = {purity})")]
    NotNormalized { index: usize, purity: f64 },
    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),
    #[error("rank {rank} is invalid for dimension {d}")]
    InvalidRank { rank: usize, d: usize },
    #[error("random generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;
