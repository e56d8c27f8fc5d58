//! Exit-code contract.

use circdeconv::Error;

/// Flag contract violations (clap uses the same code).
pub const USAGE: i32 = 2;
/// Malformed input files or configurations.
pub const DATA: i32 = 3;
/// Numeric preconditions that do not hold for the data.
pub const NUMERIC: i32 = 4;
/// A simulation replication aborted.
pub const REPLICATION: i32 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: i32, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    pub fn usage(msg: impl std::fmt::Display) -> Self {
        Self::new(USAGE, anyhow::anyhow!("{msg}"))
    }

    pub fn data(msg: impl std::fmt::Display) -> Self {
        Self::new(DATA, anyhow::anyhow!("{msg}"))
    }

    /// Classifies a library error raised while processing user data.
    pub fn from_core(e: Error) -> Self {
        let code = match &e {
            Error::EmptySample
            | Error::OutOfDomain { .. }
            | Error::NonHermitian
            | Error::Parse { .. }
            | Error::DegenerateGrid(_)
            | Error::Io(_)
            | Error::Json(_) => DATA,
            Error::InvalidParameter(_) => USAGE,
            Error::SpectrumRange { .. }
            | Error::KMaxTooSmall { .. }
            | Error::TailUnbounded
            | Error::RejectionEfficiency { .. }
            | Error::AssumptionViolated(_) => NUMERIC,
            Error::Replication { .. } => REPLICATION,
        };
        Self::new(code, e)
    }

    /// Classifies a library error raised by a configuration file: anything
    /// but an aborted replication is a schema problem.
    pub fn from_config(e: Error) -> Self {
        match e {
            Error::Replication { .. } => Self::new(REPLICATION, e),
            other => Self::new(DATA, other),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::from_core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(DATA, e)
    }
}
