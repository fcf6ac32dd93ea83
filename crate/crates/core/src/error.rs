use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "dimension mismatch: evaluation matrix has {evals_rows} samples x {evals_cols} functions, \
         sign matrix is {sign_rows} x {sign_cols}"
    )]
    DimensionMismatch {
        evals_rows: usize,
        evals_cols: usize,
        sign_rows: usize,
        sign_cols: usize,
    },

    #[error("value {value} at row {row}, column {column} lies outside the declared range [{a}, {b}]")]
    OutOfRange {
        row: usize,
        column: usize,
        value: f64,
        a: f64,
        b: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("outside validity range: {0}")]
    Validity(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
