//! Error type shared across the crate.
//!
//! Validation failures carry the violated invariant's numeric margin so a
//! diagnostic can always say how badly an input missed.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix data has {len} entries, expected {dim}x{dim} = {expected}")]
    ShapeMismatch { len: usize, dim: usize, expected: usize },

    #[error("matrix dimension {dim} does not factor as dA*dB = {da}*{db}")]
    DimensionMismatch { dim: usize, da: usize, db: usize },

    #[error("matrix is not Hermitian: max |M - M†| entry {deviation:.3e} exceeds {tol:.0e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("eigen-decomposition failed to converge for dimension {dim}")]
    EigenFailed { dim: usize },

    #[error(
        "matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} below -{tol:.0e}"
    )]
    NotPositiveSemidefinite { min_eigenvalue: f64, tol: f64 },

    #[error("trace {trace:.12} violates the unit-trace invariant by {margin:.3e} (tolerance {tol:.0e})")]
    TraceNotOne { trace: f64, margin: f64, tol: f64 },

    #[error("basis is not orthonormal: max |⟨v_i|v_j⟩ - δ_ij| = {deviation:.3e} exceeds {tol:.0e}")]
    NonOrthonormalBasis { deviation: f64, tol: f64 },

    #[error("basis has {found} vectors, expected {expected}")]
    BasisSizeMismatch { expected: usize, found: usize },

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("ensemble member dimension {found} differs from {expected}")]
    EnsembleDimensionMismatch { expected: usize, found: usize },

    #[error("ensemble probabilities sum to {sum:.12}, off by {margin:.3e} (tolerance {tol:.0e})")]
    ProbabilitiesNotNormalized { sum: f64, margin: f64, tol: f64 },

    #[error("negative probability {value:.3e}")]
    NegativeProbability { value: f64 },

    #[error("grouping tolerance {value:.3e} outside [{min:.0e}, {max:.0e}]")]
    GroupingTolOutOfRange { value: f64, min: f64, max: f64 },

    #[error(
        "state marginal does not match the block structure: max deviation {deviation:.3e} exceeds {tol:.0e}"
    )]
    MarginalMismatch { deviation: f64, tol: f64 },

    #[error(
        "operator-sum map is not trace preserving: max |Σ E†E - I| entry {deviation:.3e} exceeds {tol:.0e}"
    )]
    NotTracePreserving { deviation: f64, tol: f64 },

    #[error("operator-sum map has no elements")]
    EmptyKrausMap,

    #[error("enumeration of {required} items exceeds the limit {limit}")]
    EnumerationTooLarge { required: u128, limit: u128 },

    #[error("joint PMF sums to {sum:.15}, off by {margin:.3e} (tolerance {tol:.0e})")]
    PmfNotNormalized { sum: f64, margin: f64, tol: f64 },

    #[error("joint PMF entry ({row}, {col}) is negative: {value:.3e}")]
    PmfNegativeEntry { row: usize, col: usize, value: f64 },

    #[error("state file is '{found}' but this command needs '{expected}'")]
    KindMismatch { expected: String, found: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported state-file version {found} (expected 1)")]
    UnsupportedVersion { found: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON state file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
