use std::path::PathBuf;

use thiserror::Error;

/// Everything that makes a scan impossible to run. All map to exit code 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown metric kind `{0}`")]
    UnknownMetric(String),
    #[error("{0}")]
    Geometry(#[from] finsler::GeometryError),
    #[error("cannot write report to {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}
