//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by parsers, engines and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file. Carries the 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally valid input that violates a semantic requirement
    /// (schema mismatch, unknown fact id, invalid flag combination, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// An exact engine was asked to handle more players than its cap allows.
    #[error("player cap exceeded: {players} players, cap {cap} ({engine})")]
    CapExceeded {
        engine: &'static str,
        players: usize,
        cap: usize,
    },

    /// The configured work budget ran out before the computation finished.
    /// The partial result is discarded; a budget overrun never yields a
    /// silently degraded answer.
    #[error("work budget exceeded during {0}")]
    BudgetExceeded(&'static str),

    /// An operation was invoked outside its documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Internal invariant failure (e.g. a factorization that fails its
    /// read-once verification). Always a bug, never a user error.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
