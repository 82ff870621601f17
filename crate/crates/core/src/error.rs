use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("incomplete table: {0}")]
    IncompleteTable(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("degenerate embedding: row {row} of {which} has zero norm")]
    DegenerateEmbedding { which: String, row: usize },

    #[error("empty pool: video has zero whole seconds (fps {fps}, total_frames {total_frames})")]
    EmptyPool { fps: f64, total_frames: u64 },

    #[error("degenerate spacing: cap = 1 cannot cover {duration} seconds")]
    DegenerateSpacing { duration: u64 },

    #[error("index error: position {index} outside 1..={len}")]
    Index { index: usize, len: usize },

    #[error("duplicate error: position {0} is already selected")]
    Duplicate(usize),

    #[error("budget error: K must be at least 1, got {0}")]
    Budget(usize),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("instance too large: N = {n} exceeds the enumeration guard of {max}")]
    InstanceTooLarge { n: usize, max: usize },

    #[error("missing class: no training example for type `{0}`")]
    MissingClass(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("routing gap: type `{0}` has no routing entry")]
    RoutingGap(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error.
    ///
    /// 2 covers malformed inputs, 3 misaligned or degenerate data, 4 invalid
    /// parameters, 5 failed verification runs, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            Error::Format(_) | Error::IncompleteTable(_) => 2,
            Error::Alignment(_) | Error::DegenerateEmbedding { .. } => 3,
            Error::EmptyPool { .. }
            | Error::DegenerateSpacing { .. }
            | Error::Index { .. }
            | Error::Duplicate(_)
            | Error::Budget(_)
            | Error::Parameter(_)
            | Error::InstanceTooLarge { .. }
            | Error::MissingClass(_)
            | Error::DegenerateData(_)
            | Error::RoutingGap(_) => 4,
            Error::Verification(_) => 5,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(format!("json: {e}"))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(format!("csv: {e}"))
    }
}
