use thiserror::Error;

/// Errors raised across the library.
///
/// Every variant except [`Error::Numerical`] describes input that failed
/// validation; the CLI maps those to exit status 2 and numerical failures to 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error(
        "column {column} is linearly dependent on the preceding columns (residual {residual:e})"
    )]
    Degenerate { column: usize, residual: f64 },

    #[error("operator {index} is not normal (commutator norm {commutator:e})")]
    UnsupportedOperator { index: usize, commutator: f64 },

    #[error("numerical failure: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },
}

impl Error {
    pub(crate) fn invariant(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            name,
            detail: detail.into(),
        }
    }

    /// True for failures caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
