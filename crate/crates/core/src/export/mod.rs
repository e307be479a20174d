//! Serialization: Pajek `.net`, SVG maps, CSV tables, and the native
//! snapshot format that lets `compare` runs skip preprocessing.

pub mod native;
pub mod pajek;
pub mod svg;
pub mod tables;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: not a framescope snapshot (expected header {expected:?})")]
    BadHeader { path: String, expected: String },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("layout has no position for node {0:?}")]
    MissingPosition(String),
}
