use std::path::PathBuf;

use thiserror::Error;

use crate::decisions::DecisionError;
use crate::ingestion::IngestError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_) | Error::Decision(_))
    }

    /// Process exit code: 1 for bad input, 2 for broken internal invariants.
    pub fn exit_code(&self) -> u8 {
        if self.is_invariant() {
            2
        } else {
            1
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
