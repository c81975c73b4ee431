use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    /// Pivot magnitude fell below the drop tolerance. `pivot` is the row of the
    /// original matrix at which elimination broke down.
    #[error("singular matrix: pivot {pivot} below drop tolerance")]
    SingularMatrix { pivot: usize },

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("diagonal entry {0} lies in {{0, -1}}")]
    InvalidDiagonal(usize),

    #[error("matrix is not diagonal")]
    NotDiagonal,

    #[error("dimension {n} exceeds the brute-force cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },

    #[error("unknown instance name `{0}`")]
    UnknownName(String),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("I/O error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
