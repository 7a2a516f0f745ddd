use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid map/experiment configuration (σ ≤ 0, m = 0, bad architecture, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An example or label that does not fit the map or dataset it is used with.
    #[error("input error: {0}")]
    Input(String),

    /// Malformed text input. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    /// Malformed binary input (IDX, CIFAR, model files).
    #[error("format error: {0}")]
    Format(String),

    /// Operation not valid in the current state (empty class, no examples, ...).
    #[error("state error: {0}")]
    State(String),

    /// Sketches built from different feature maps.
    #[error("incompatible sketches: {0}")]
    Incompatible(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }
}
