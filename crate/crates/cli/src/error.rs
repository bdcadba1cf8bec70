use serde::Serialize;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Malformed configuration or command line.
    Parse,
    /// Well-formed input that violates an operation's preconditions.
    Precondition,
    /// A valid computation that failed while running.
    Runtime,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Parse, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Precondition, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Runtime, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Parse => 2,
            ErrorKind::Precondition => 3,
            ErrorKind::Runtime => 4,
        }
    }

    /// Single-line JSON for standard error.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "exit_code": self.exit_code(), "message": self.message }).to_string()
    }
}

impl From<perclab::Error> for CliError {
    fn from(e: perclab::Error) -> Self {
        let kind = match &e {
            perclab::Error::Parse { .. } => ErrorKind::Parse,
            e if e.is_precondition() => ErrorKind::Precondition,
            _ => ErrorKind::Runtime,
        };
        CliError { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(format!("i/o: {e}"))
    }
}
