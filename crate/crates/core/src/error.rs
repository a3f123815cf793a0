use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("fleet size {n} outside [1, {max}]")]
    FleetSizeOutOfRange { n: usize, max: usize },

    #[error("trace line {line}: {reason}")]
    Trace { line: u64, reason: String },

    #[error("insufficient data for base station {bs_id}: need {needed} samples, got {got}")]
    InsufficientData { bs_id: u32, needed: usize, got: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input values, as opposed to I/O failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
            && !matches!(self, Error::Csv(e) if e.is_io_error())
    }
}
