use std::fmt;

use tmoment::MomentError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input.
    Usage(String),
    /// Failure inside the moment engine.
    Moment(MomentError),
    /// The oracle itself failed (always a numerical failure).
    Oracle(MomentError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Oracle(_) => EXIT_NUMERICAL,
            CliError::Moment(e) => match e {
                MomentError::DimensionMismatch { .. } => EXIT_USAGE,
                MomentError::NoAcceptedSamples { .. } => EXIT_NUMERICAL,
                e if e.is_convergence() => EXIT_NUMERICAL,
                _ => EXIT_DOMAIN,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Moment(e) => write!(f, "{e}"),
            CliError::Oracle(e) => write!(f, "oracle failed: {e}"),
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        CliError::Moment(e)
    }
}
