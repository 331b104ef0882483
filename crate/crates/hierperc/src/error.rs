use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] hierperc_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("config: {0}")]
    Config(String),
    #[error("{failed} of {total} replicas failed")]
    PartialFailure { failed: usize, total: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Core(hierperc_core::Error::Capacity { .. }) => 3,
            Error::Core(hierperc_core::Error::InvalidInput(_))
            | Error::Core(hierperc_core::Error::UnsupportedProfile(_))
            | Error::Core(hierperc_core::Error::CouplingOrder { .. }) => 2,
            Error::PartialFailure { .. } => 4,
            _ => 1,
        }
    }
}
