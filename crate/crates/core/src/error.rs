use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid solver parameters, mismatched dimensions or malformed input.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// A coordinate, objective value or direction stopped being finite.
    #[error("divergence{}: {what}", agent.map(|a| format!(" at agent {}", a + 1)).unwrap_or_default())]
    Divergence {
        /// Zero-based agent index, when the failure can be attributed to one agent.
        agent: Option<usize>,
        what: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn diverged(what: impl Into<String>) -> Self {
        Error::Divergence {
            agent: None,
            what: what.into(),
        }
    }

    /// Attributes a divergence error to `agent` unless it already names one.
    pub(crate) fn at_agent(self, agent: usize) -> Self {
        match self {
            Error::Divergence { agent: None, what } => Error::Divergence {
                agent: Some(agent),
                what,
            },
            other => other,
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Divergence { .. })
    }
}
