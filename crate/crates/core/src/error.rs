use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} is outside the sketch domain (strictly positive reals)")]
    Domain { value: f64 },

    #[error("cannot remove from bucket {index}: counter would drop below zero")]
    Underflow { index: i64 },

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("sketches do not share an initial accuracy and cannot be merged")]
    IncompatibleSketches,

    #[error("sketch is empty")]
    EmptySketch,

    #[error("network-size estimate is zero; peer has not received any estimate yet")]
    InvalidEstimate,

    #[error("input is empty")]
    EmptyInput,

    #[error("group {group} needs values up to 1e{exponent}, beyond the representable range")]
    Overflow { group: usize, exponent: i32 },

    #[error("peer {0} is offline")]
    PeerOffline(usize),

    #[error("{path}: missing column `{column}` in header")]
    MalformedHeader { path: PathBuf, column: &'static str },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("round {round}, peer {peer}: {source}")]
    Round {
        round: usize,
        peer: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// I/O failure on `path`, keeping the original error kind.
    pub(crate) fn io_at(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io(std::io::Error::new(
            source.kind(),
            format!("{}: {source}", path.display()),
        ))
    }

    /// Short category label, used for the process exit diagnostic.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } | Error::Config { .. } => "config",
            Error::Io(_) | Error::MalformedHeader { .. } => "io",
            Error::Round { .. } => "simulation",
            _ => "sketch",
        }
    }
}
