//! Exit statuses: 0 ok, 1 check failure, 2 configuration error, 3 numeric guard.

use std::fmt;

use randattr::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Check,
    Config,
    Guard,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Check,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        match self.kind {
            Kind::Check => 1,
            Kind::Config => 2,
            Kind::Guard => 3,
        }
    }

    /// The more severe of two failures (guard > config > check).
    pub fn worst(self, other: Failure) -> Failure {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::GuardExceeded { .. } | Error::PathRange { .. } => Kind::Guard,
            Error::Monotonicity { .. } | Error::NotConverged { .. } | Error::Invariant { .. } => Kind::Check,
            _ => Kind::Config,
        };
        Failure {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(format!("I/O error: {e}"))
    }
}
