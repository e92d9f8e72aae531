use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("unknown category `{0}` (expected one of a..j)")]
    UnknownCategory(String),

    #[error("unknown domain `{0}` (expected `sim` or `real`)")]
    UnknownDomain(String),

    #[error("lane {lane} is outside the field (valid lanes: 0..{lanes})")]
    LaneOutOfRange { lane: usize, lanes: usize },

    #[error("image dimensions {width}x{height} are not renderable")]
    EmptyImage { width: u32, height: u32 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("mask is not binary: found value {value} at ({x}, {y})")]
    NonBinaryMask { x: u32, y: u32, value: u8 },

    #[error("input {width}x{height} is smaller than the {min}x{min} minimum")]
    Undersized { width: u32, height: u32, min: u32 },

    #[error("not enough `{domain}` entries: requested {requested}, available {available} (short by {})", requested - available)]
    InsufficientEntries {
        domain: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("duplicate model id `{0}`")]
    DuplicateModel(String),

    #[error("{0}")]
    Undefined(String),

    #[error("manifest is invalid: {0}")]
    InvalidManifest(String),

    #[error("unsupported config schema {0} (this build reads schema 1)")]
    Schema(u32),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
