use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("realizer target lands outside every symbol interval (offset {0})")]
    InvalidTarget(i64),
    #[error("discretization error: {0}")]
    Discretization(String),
    #[error("closure violation: path weights do not converge ({0})")]
    ClosureViolation(String),
    #[error("stack-depth budget {0} exhausted while an exact result was requested")]
    Truncation(usize),
    #[error("outside the supported fragment: {0}")]
    Scope(String),
    #[error("bad parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
