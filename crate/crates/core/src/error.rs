use std::fmt;

/// A failed distance-matrix check, located at the first offending entry in
/// row-major order.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixViolation {
    NonFinite { row: usize, col: usize },
    Negative { row: usize, col: usize, value: f64 },
    NonzeroDiagonal { index: usize, value: f64 },
    Asymmetric { row: usize, col: usize, upper: f64, lower: f64 },
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MatrixViolation::NonFinite { row, col } => {
                write!(f, "non-finite entry at ({row},{col})")
            }
            MatrixViolation::Negative { row, col, value } => {
                write!(f, "negative entry {value} at ({row},{col})")
            }
            MatrixViolation::NonzeroDiagonal { index, value } => {
                write!(f, "nonzero diagonal entry {value} at ({index},{index})")
            }
            MatrixViolation::Asymmetric {
                row,
                col,
                upper,
                lower,
            } => write!(
                f,
                "asymmetric entries at ({row},{col})/({col},{row}): {upper} vs {lower}"
            ),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid distance matrix: {0}")]
    Matrix(MatrixViolation),
    #[error("unsupported mode: {0}")]
    Unsupported(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("unknown connection id {0}")]
    UnknownConnection(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
