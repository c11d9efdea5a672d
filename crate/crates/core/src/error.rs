use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Load {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("graph construction failed: {0}")]
    Graph(String),

    #[error("partition covers {got} vertices, graph has {expected}")]
    VertexCountMismatch { expected: usize, got: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("start partition is not a coarsening of the base partition (vertex {vertex})")]
    NotCoarsening { vertex: usize },

    #[error("unknown cluster id {0}")]
    UnknownCluster(usize),

    #[error("unknown block {0}")]
    UnknownBlock(usize),

    #[error("cannot project {clusters} clusters onto {target}")]
    Projection { clusters: usize, target: usize },

    #[error("training data invalid: {0}")]
    Training(String),

    #[error("labelings differ: {0}")]
    LabelMismatch(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
