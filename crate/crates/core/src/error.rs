use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("corpus is invalid:\n  {}", .0.join("\n  "))]
    Corpus(Vec<String>),
    #[error("config: {0}")]
    Config(String),
    #[error("metric specs: {0}")]
    MetricSpec(String),
    #[error("output: {0}")]
    Output(String),
}

impl CoreError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CoreError::Io { path: path.into(), source }
    }

    pub fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        CoreError::Json { path: path.into(), source }
    }
}

pub(crate) fn read_text(path: &std::path::Path) -> Result<String, CoreError> {
    std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CoreError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CoreError::json(path, e))
}
