use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ancestral function: {0}")]
    InvalidFunction(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("lineage index {index} out of range for a state with {len} lineages")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("illegal coalescence of lineages {i} and {j} in a state with {len} lineages")]
    IllegalCoalescence { i: usize, j: usize, len: usize },

    #[error("locus {u} is outside the active interval ({lo}, {hi}) of lineage {i}")]
    LocusOutsideActiveInterval { i: usize, u: f64, lo: f64, hi: f64 },

    #[error("no event can occur in the absorbing state")]
    Absorbed,

    #[error("event cap of {cap} exceeded")]
    EventCapExceeded { cap: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid density specification `{0}`")]
    Density(String),

    #[error("spatial bookkeeping inconsistency: {0}")]
    Bookkeeping(String),

    #[error("generated path failed validation: {0}")]
    Validation(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
