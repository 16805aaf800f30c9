use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    /// An input violated a structural invariant (graph, model, corpus, schedule).
    #[error("validation error: {0}")]
    Validation(String),

    /// A caller broke an operation's precondition, e.g. asked for the angle
    /// between two nodes that are not adjacent.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown node id {0:?}")]
    UnknownNode(String),

    #[error("no route from {start:?} to {dest:?}")]
    Unreachable { start: String, dest: String },

    #[error("brute force search refused: graph has {nodes} nodes, limit is {limit}")]
    GuardExceeded { nodes: usize, limit: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
