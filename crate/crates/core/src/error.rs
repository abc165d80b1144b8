use std::path::PathBuf;

use crate::region::CharacterRange;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid character range ({l1}, {c1}, {l2}, {c2})")]
    InvalidRange { l1: usize, c1: usize, l2: usize, c2: usize },

    #[error("range {range} lies outside the file ({lines} lines)")]
    OutOfBounds { range: CharacterRange, lines: usize },

    #[error("git repository error: {0}")]
    Repo(String),

    #[error("`{path}` does not exist at commit {commit}")]
    NotFound { commit: String, path: String },

    #[error("`{path}` at commit {commit} is a binary file")]
    BinaryFile { commit: String, path: String },

    #[error("`git {args}` exited with {status}: {stderr}")]
    DiffToolFailure {
        args: String,
        status: String,
        stderr: String,
    },

    #[error("malformed diff: {0}")]
    MalformedDiff(String),

    #[error("{path}:{line}: {message}")]
    Dataset {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the region itself rather than the repository.
    pub fn is_region_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidRange { .. } | Error::OutOfBounds { .. } | Error::NotFound { .. } | Error::BinaryFile { .. }
        )
    }
}
