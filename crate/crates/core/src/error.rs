use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulation {name}: supported are {supported}")]
    UnsupportedModulation { name: String, supported: &'static str },

    #[error("symbol index {index} out of range for alphabet of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("non-finite input sample")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The decoded index lands on a point that only exists in the extended
    /// (calculation-only) grid, i.e. the coded symbol was corrupted.
    #[error("coded symbol {coded} with known symbol {known} decodes to a non-transmittable point")]
    DecodeFailure { coded: usize, known: usize },

    #[error("target {target} outside achievable range ({low}, {high})")]
    TargetOutOfRange { target: f64, low: f64, high: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
