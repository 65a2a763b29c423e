use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined
    /// or where its accuracy is documented.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series failed to converge: {0}")]
    Convergence(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Elimination hit a nonpositive pivot. The M-matrix structure of the
    /// systems solved here rules this out, so it signals a broken invariant.
    #[error("nonpositive pivot {value} in row {row}")]
    Pivot { row: usize, value: f64 },

    #[error("root not found: {0}")]
    RootNotFound(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("observed order undefined: {0}")]
    UndefinedOrder(String),
}

pub type Result<T> = std::result::Result<T, Error>;
