use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {0}: need d >= 1")]
    InvalidDimension(usize),

    #[error("axis {axis} out of range for dimension {d}")]
    InvalidAxis { axis: usize, d: usize },

    #[error("{what} = {value} exceeds the configured maximum {max}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("invalid overlap pattern: {0}")]
    InvalidPattern(String),

    #[error("pattern {0} is not connected")]
    Disconnected(String),

    #[error("weight undefined on {} pattern(s): {}", .0.len(), .0.join(", "))]
    MissingWeights(Vec<String>),

    #[error("no tally available for d={d}, s={s}")]
    MissingTally { d: usize, s: usize },

    #[error("tally for d={d}, s={s} is not complete")]
    IncompleteTally { d: usize, s: usize },

    #[error("window {window} too small: need at least {min}")]
    WindowTooSmall { window: usize, min: usize },

    #[error("{path}:{line}: bad {field}: {msg}")]
    Parse {
        path: String,
        line: usize,
        field: &'static str,
        msg: String,
    },

    #[error("checkpoint {path}: {field} mismatch (file has {found}, expected {expected})")]
    CheckpointMismatch {
        path: PathBuf,
        field: &'static str,
        expected: String,
        found: String,
    },

    #[error("{path}: checksum mismatch")]
    Checksum { path: PathBuf },

    #[error("site count {0} is odd")]
    OddSites(usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
