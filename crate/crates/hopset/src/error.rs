use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate graph: no pair of mutually reachable vertices")]
    Degenerate,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hopset was built for a different graph (expected checksum {expected}, graph has {found})")]
    Mismatch { expected: String, found: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidGraph(_)
            | Error::Degenerate
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Mismatch { .. } => 3,
            Error::Internal(_) => 1,
        }
    }
}
