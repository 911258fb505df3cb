use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable contexts are not compatible: {0}")]
    ContextMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("series cap exhausted: {0}")]
    CapExhausted(String),
    #[error("substitution not representable: {0}")]
    NotRepresentable(String),
    #[error("matrix is singular (rank {rank} of {size})")]
    Singular { rank: usize, size: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
