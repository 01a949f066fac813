use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ocf_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}", ingest_message(.row, .column, .message))]
    Ingest {
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    /// Line-oriented text formats: manifests, specs, forests, LP files.
    #[error("{what} line {line}, column {column}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("solver binary not found: {0}")]
    SolverMissing(String),

    #[error("solver failed: {message} (log: {log})")]
    Solver { message: String, log: PathBuf },

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn ingest_message(row: &Option<usize>, column: &Option<String>, message: &str) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!("row {r}, column {c}: {message}"),
        (Some(r), None) => format!("row {r}: {message}"),
        (None, Some(c)) => format!("column {c}: {message}"),
        (None, None) => message.to_owned(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            what,
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn ingest(row: Option<usize>, column: Option<&str>, message: impl Into<String>) -> Self {
        Error::Ingest {
            row,
            column: column.map(str::to_owned),
            message: message.into(),
        }
    }

    /// Process exit code: 1 usage/configuration, 2 data, 3 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SolverMissing(_) | Error::Solver { .. } => 3,
            Error::Config(_) => 1,
            Error::Core(ocf_core::Error::Config(_)) => 1,
            _ => 2,
        }
    }
}
