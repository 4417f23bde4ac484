use std::path::PathBuf;

/// Errors raised by the command-line driver and file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] framepot_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("csv error in {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("validation failed: {0} check(s) did not pass")]
    ValidationFailed(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub mod exit_code {
    pub const GENERIC: i32 = 1;
    pub const IO: i32 = 2;
    pub const WIDTH_CAP: i32 = 3;
    pub const PARSE: i32 = 4;
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(framepot_core::Error::WidthCapExceeded { .. }) => exit_code::WIDTH_CAP,
            Error::Io { .. } => exit_code::IO,
            Error::Csv { source, .. } if source.is_io_error() => exit_code::IO,
            Error::Parse { .. } | Error::Csv { .. } => exit_code::PARSE,
            _ => exit_code::GENERIC,
        }
    }
}
