use std::fmt;
use std::path::Path;

use aerocell_core::Error as CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Validation,
    Io,
    Internal,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Validation => 1,
            Kind::Io => 2,
            Kind::Internal => 3,
        }
    }
}

/// A failure tagged with the pipeline stage it happened in.
#[derive(Debug)]
pub struct CliError {
    pub stage: &'static str,
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(stage: &'static str, kind: Kind, message: impl Into<String>) -> Self {
        CliError {
            stage,
            kind,
            message: message.into(),
        }
    }

    pub fn validation(stage: &'static str, message: impl Into<String>) -> Self {
        Self::new(stage, Kind::Validation, message)
    }

    pub fn io(stage: &'static str, path: &Path, err: std::io::Error) -> Self {
        Self::new(stage, Kind::Io, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.message)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a stage label to core errors.
pub trait Staged<T> {
    fn stage(self, stage: &'static str) -> CliResult<T>;
}

impl<T> Staged<T> for aerocell_core::Result<T> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|e| {
            let kind = if e.is_validation() { Kind::Validation } else { Kind::Io };
            let message = match &e {
                CoreError::Csv(c) if c.is_io_error() => format!("I/O error: {c}"),
                _ => e.to_string(),
            };
            CliError::new(stage, kind, message)
        })
    }
}
