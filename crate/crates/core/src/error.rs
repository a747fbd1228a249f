use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("{what} exceeded cap of {limit}")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("homomorphism inconsistent: {0}")]
    Inconsistent(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("word is not hyperbolic")]
    NotHyperbolic,
    #[error("graph is not folded")]
    NotFolded,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn syntax(column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line: 1,
            column,
            message: message.into(),
        }
    }

    /// Re-positions a syntax error reported against a single line.
    pub fn at_line(self, line: usize, column_offset: usize) -> Self {
        match self {
            Error::Syntax {
                column, message, ..
            } => Error::Syntax {
                line,
                column: column + column_offset,
                message,
            },
            other => other,
        }
    }
}
