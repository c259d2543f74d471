//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, factorization, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Cholesky factorization hit a non-positive pivot, so the input matrix
    /// is not Hermitian positive definite. `index` is the offending row.
    #[error("matrix is not positive definite: non-positive pivot at index {index}")]
    NotPositiveDefinite { index: usize },

    /// A triangular solve hit a zero diagonal entry. `index` is the row.
    #[error("triangular matrix is singular: zero diagonal at index {index}")]
    SingularTriangular { index: usize },

    /// A matrix failed the Hermitian symmetry check.
    #[error("matrix is not Hermitian within tolerance: max deviation {deviation:.3e} at ({row}, {col})")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    /// Configuration text could not be parsed or validated. `line` is the
    /// 1-based line number when the problem is tied to a specific line.
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    /// Underlying I/O failure (config read, CSV write).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for an invalid-argument error.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Shorthand for a config error without a line number.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config { line: None, message: msg.into() }
    }

    /// Shorthand for a config error tied to a 1-based line number.
    pub fn config_at(line: usize, msg: impl Into<String>) -> Self {
        Error::Config { line: Some(line), message: msg.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_name_the_offending_index() {
        let e = Error::NotPositiveDefinite { index: 3 };
        assert!(e.to_string().contains("index 3"));
        let e = Error::SingularTriangular { index: 7 };
        assert!(e.to_string().contains("index 7"));
    }

    #[test]
    fn config_error_carries_line_number() {
        let e = Error::config_at(12, "unknown key `foo`");
        let msg = e.to_string();
        assert!(msg.contains("line 12"), "{msg}");
        assert!(msg.contains("unknown key"), "{msg}");
        assert!(!Error::config("general").to_string().contains("line"));
    }
}
