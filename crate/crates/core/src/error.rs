use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in this crate.
///
/// Variants are grouped by [`ErrorKind`] so the command line can map them
/// onto stable exit codes.
#[derive(Debug, Error)]
pub enum Error {
    // numerics
    #[error("no sign change found after {doublings} bracket doublings (upper bracket {upper})")]
    NoSignChange { doublings: usize, upper: f64 },
    #[error("non-finite value encountered at x = {at}")]
    NonFinite { at: f64 },
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    MaxIterations { iterations: usize, last_change: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(&'static str),

    // data
    #[error("covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:e}, max {max_eigenvalue:e})")]
    NotPsd {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },
    #[error("dimension p = {p} too small, need at least {min}")]
    DimensionTooSmall { p: usize, min: usize },
    #[error("class {class} has {count} samples, need at least 2")]
    ClassTooSmall { class: u8, count: usize },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid class statistics: {0}")]
    InvalidStats(String),
    #[error("k = {k} folds invalid for n = {n} samples")]
    KTooLarge { k: usize, n: usize },
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("non-numeric value {value:?} in column {column:?} (row {row})")]
    NonNumericFeature {
        row: usize,
        column: String,
        value: String,
    },
    #[error("label column holds more than two distinct values: {0:?}")]
    MoreThanTwoLabels(Vec<String>),

    // classifiers
    #[error("projection dimension d = {d} invalid for p = {p}")]
    BadDimensions { d: usize, p: usize },
    #[error("covariance is singular (condition number {condition:e})")]
    SingularCovariance { condition: f64 },
    #[error(
        "projected covariance singular after {attempts} attempts (condition number {condition:e})"
    )]
    SingularProjectedCovariance { attempts: usize, condition: f64 },
    #[error("projection dimension d = {d} exceeds the allowed maximum {max}")]
    DTooLarge { d: usize, max: usize },

    // asymptotics
    #[error("projection dimension d = {d} must be below p = {p}")]
    DGeqP { d: usize, p: usize },
    #[error("covariance is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("population statistics required for this regime but none supplied")]
    OracleRequired,
    #[error("closed form assumption violated: {0}")]
    AssumptionViolated(String),

    // gestimate
    #[error("d = {d} too large for covariance rank {rank} (need d <= rank - 2)")]
    DTooLargeForRank { d: usize, rank: usize },
    #[error("estimated discriminant variance is degenerate ({0:e}); class means coincide")]
    DegenerateVariance(f64),

    // evaluation
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("d = {d} too large for fold {fold} of repeat {repeat} (training rank {rank})")]
    DTooLargeForFold {
        d: usize,
        fold: usize,
        repeat: usize,
        rank: usize,
    },

    // cli / io
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NoSignChange { .. }
            | NonFinite { .. }
            | MaxIterations { .. }
            | SingularCovariance { .. }
            | SingularProjectedCovariance { .. }
            | NotPositiveDefinite { .. }
            | NotPsd { .. }
            | DegenerateVariance(_) => ErrorKind::Numerical,
            Io { .. } | Csv(_) | Json(_) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }

    /// 2 for validation errors, 3 for numerical failures, 4 for IO.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Io => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
