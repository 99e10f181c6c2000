use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad argument values (indices out of range, empty inputs, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// Parameter outside its admissible range (sigma <= 0, alpha >= 1, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Malformed files or mismatched schemas.
    #[error("data error: {0}")]
    Data(String),

    /// Numeric failure that could not be recovered.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code for the CLI contract: 2 usage, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parameter(_) => 2,
            Error::Data(_) | Error::Io { .. } => 3,
            Error::Numeric(_) => 4,
        }
    }
}
