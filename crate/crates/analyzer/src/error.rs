//! Error types.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A lexing or parsing failure with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("line {line}, col {col}: {message}")]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum AnalyzerError {
    #[error("invalid rule registry: {0}")]
    Registry(String),
    #[error("invalid operator table: {0}")]
    OperatorTable(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
