use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must be at least {min}x{min}, got {width}x{height}")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("data length {found} does not match {width}x{height}")]
    DataLength {
        width: usize,
        height: usize,
        found: usize,
    },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("{what}: non-finite value at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("{what}: negative value {value} at index {index}")]
    Negative {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("pattern value {value} at index {index} is not 0 or 1")]
    NotBinary { index: usize, value: u8 },

    #[error("{0} is identically zero")]
    AllZero(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("region mask is empty")]
    EmptyMask,

    #[error("{0} has zero mean over the mask")]
    ZeroMean(&'static str),

    #[error("non-finite field produced at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed header: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("{path}: unsupported bit depth (max value {maxval})")]
    UnsupportedBitDepth { path: PathBuf, maxval: u32 },

    #[error("{path}: malformed data: {reason}")]
    MalformedData { path: PathBuf, reason: String },

    #[error("{path}: ragged CSV, row {row} has {found} columns, expected {expected}")]
    RaggedCsv {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::MalformedHeader { .. }
            | Error::UnsupportedBitDepth { .. }
            | Error::MalformedData { .. }
            | Error::RaggedCsv { .. } => ErrorKind::Io,
            Error::Diverged { .. } | Error::ZeroMean(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
