use thiserror::Error;

/// Errors raised by the numerical and game layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("matrix is not Hermitian: max |m - m^dagger| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("observable has degenerate eigenvalues {a} and {b}")]
    DegenerateSpectrum { a: f64, b: f64 },

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("operator has eigenvalue {0} below the positivity window")]
    NegativeEigenvalue(f64),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "closed-form and engine values disagree at p1 = {p1}: {column} differs by {deviation:e}"
    )]
    CurveMismatch {
        p1: f64,
        column: &'static str,
        deviation: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
