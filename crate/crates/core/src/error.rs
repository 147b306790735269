use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The search budget ran out before the operation could finish.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// An operation whose result is only meaningful under certain
    /// preconditions declined to run because they were not certified.
    #[error("refused: {0}")]
    Refused(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownName { kind: &'static str, name: String, available: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
