//! Error types shared across the crate.

use crate::term::Sort;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("sort error: {0}")]
    Sort(String),
    #[error("signature error: symbol `{symbol}` is not part of the {theory} signature")]
    Signature { symbol: String, theory: String },
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
}

impl SolverError {
    pub fn sort_mismatch(context: &str, left: Sort, right: Sort) -> SolverError {
        SolverError::Sort(format!("{context}: {left} vs {right}"))
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;
