use std::fmt;
use std::process::ExitCode;

use holobgs::ErrorKind;

/// A failure with the exit status the process should report.
#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Io,
            message: message.into(),
        }
    }

    /// 1 validation, 2 I/O, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<holobgs::Error> for CliError {
    fn from(e: holobgs::Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::validation(format!("manifest: {e}"))
    }
}
