use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) references a node outside [0, {n})")]
    EdgeOutOfRange { u: u32, v: u32, n: usize },

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("generator failed: {0}")]
    Generation(String),

    #[error("graph too dense to add {needed} replacement edges")]
    TooDense { needed: usize },

    #[error("expected frequencies require a connected undirected graph")]
    NotConnected,

    #[error("statistics of an empty value list are undefined")]
    EmptyValues,

    #[error("profile lengths differ: {left} vs {right}")]
    ProfileLengthMismatch { left: usize, right: usize },

    #[error("feature set selects no blocks")]
    EmptyFeatureSet,

    #[error("classification needs at least two classes, got {0}")]
    SingleClass(usize),

    #[error("class {label:?} has {count} sample(s); at least 2 are required")]
    ClassTooSmall { label: String, count: usize },

    #[error("feature width mismatch: model expects {expected}, got {got}")]
    FeatureWidthMismatch { expected: usize, got: usize },

    #[error("cannot split {samples} samples into {folds} folds")]
    TooFewSamples { samples: usize, folds: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dataset is empty: {0}")]
    EmptyDataset(String),

    #[error("inconsistent dataset bundle: {0}")]
    InconsistentBundle(String),

    #[error("refusing to overwrite {0} (pass force to allow)")]
    WouldOverwrite(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
