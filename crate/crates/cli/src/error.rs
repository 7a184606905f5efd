use std::fmt;
use std::path::PathBuf;

/// Front-end failures. All of them map to exit status 2.
#[derive(Debug)]
pub enum CliError {
    Config {
        file: Option<PathBuf>,
        line: Option<usize>,
        message: String,
    },
    Io {
        path: PathBuf,
        message: String,
    },
    Core(convexcert_core::Error),
}

impl CliError {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        CliError::Config {
            file: None,
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        CliError::Config {
            file: None,
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn in_file(self, path: &std::path::Path) -> Self {
        match self {
            CliError::Config { line, message, .. } => CliError::Config {
                file: Some(path.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config {
                file: Some(p),
                line: Some(l),
                message,
            } => write!(f, "{}:{l}: {message}", p.display()),
            CliError::Config {
                file: None,
                line: Some(l),
                message,
            } => write!(f, "config line {l}: {message}"),
            CliError::Config { message, .. } => write!(f, "invalid configuration: {message}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CliError {}

impl From<convexcert_core::Error> for CliError {
    fn from(e: convexcert_core::Error) -> Self {
        CliError::Core(e)
    }
}
