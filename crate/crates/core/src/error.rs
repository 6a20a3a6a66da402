use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("training data holds a single class ({0}); at least two are required")]
    SingleClass(u32),

    #[error("dimension mismatch: model has {expected} features, row has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("label {label} outside 1..={classes}")]
    LabelOutOfRange { label: u32, classes: usize },

    #[error("length mismatch: {left} true labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("minority group has {found} rows, {required} required")]
    TooFewMinority { found: usize, required: usize },

    #[error("majority group is empty")]
    EmptyMajority,

    #[error("{method} is not an oversampler")]
    NotAnOversampler { method: String },

    #[error("class {class}: {source}")]
    InRun {
        class: u32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        line: usize,
        column: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            column,
            message: message.into(),
        }
    }
}
