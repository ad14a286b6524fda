use std::path::PathBuf;

/// Errors surfaced by the command-line tool.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{path}: field `{field}`: {msg}")]
    Field {
        path: String,
        field: &'static str,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] cvhet_core::Error),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 for bad input, 2 for internal inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_internal() => 2,
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
