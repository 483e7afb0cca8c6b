//! Crate-wide error type and its classification into exit codes.

use thiserror::Error;

use crate::addops::AddopsError;
use crate::arith::ArithError;
use crate::chern::ChernError;
use crate::fgl::FglError;
use crate::gamma::GammaError;
use crate::series::SeriesError;

/// What kind of failure an error represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-domain input.
    Input,
    /// A computed object failed a verification it must pass.
    Assertion,
    /// A degree, arity, search or memory cap was too small.
    Cap,
}

impl ErrorKind {
    /// Process exit code: 1 input, 2 assertion, 3 cap or memory.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 1,
            ErrorKind::Assertion => 2,
            ErrorKind::Cap => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Addops(#[from] AddopsError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Assertion(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Arith(_) | Error::Input(_) => ErrorKind::Input,
            Error::Assertion(_) => ErrorKind::Assertion,
            Error::Series(e) => series_kind(e),
            Error::Fgl(e) => fgl_kind(e),
            Error::Addops(e) => addops_kind(e),
            Error::Chern(e) => chern_kind(e),
            Error::Gamma(e) => gamma_kind(e),
        }
    }
}

fn series_kind(e: &SeriesError) -> ErrorKind {
    match e {
        SeriesError::CapExceeded { .. } | SeriesError::MemoryCap { .. } => ErrorKind::Cap,
        _ => ErrorKind::Input,
    }
}

fn fgl_kind(e: &FglError) -> ErrorKind {
    match e {
        FglError::Series(s) => series_kind(s),
        FglError::CapTooSmall { .. } => ErrorKind::Cap,
        FglError::NonIntegral { .. } | FglError::Inconsistent(_) => ErrorKind::Assertion,
        FglError::Arith(_) | FglError::NonUnit { .. } | FglError::InvalidLog | FglError::Spec(_) => ErrorKind::Input,
    }
}

fn addops_kind(e: &AddopsError) -> ErrorKind {
    match e {
        AddopsError::Fgl(f) => fgl_kind(f),
        AddopsError::Series(s) => series_kind(s),
        AddopsError::CapInsufficient(_) | AddopsError::SearchExhausted { .. } => ErrorKind::Cap,
        AddopsError::Infeasible(_) | AddopsError::NotIntegral { .. } | AddopsError::Inconsistent(_) => ErrorKind::Assertion,
        AddopsError::Arith(_)
        | AddopsError::SourceNotMorava
        | AddopsError::Mismatch(_)
        | AddopsError::SingularBasis(_)
        | AddopsError::NonUnit { .. }
        | AddopsError::Table(_) => ErrorKind::Input,
    }
}

fn chern_kind(e: &ChernError) -> ErrorKind {
    match e {
        ChernError::Addops(a) => addops_kind(a),
        ChernError::Fgl(f) => fgl_kind(f),
        ChernError::Series(s) => series_kind(s),
        ChernError::CapInsufficient(_) => ErrorKind::Cap,
        ChernError::Solver { .. } | ChernError::NotIntegral { .. } | ChernError::CrossCheck(_) => ErrorKind::Assertion,
        ChernError::SourceNotMorava | ChernError::NotTypical(_) => ErrorKind::Input,
    }
}

fn gamma_kind(e: &GammaError) -> ErrorKind {
    match e {
        GammaError::Chern(c) => chern_kind(c),
        GammaError::ConstantUnavailable { .. } => ErrorKind::Cap,
        GammaError::InvalidModule(_) | GammaError::UnknownCell(_) | GammaError::NotSubvariety(_) | GammaError::Json(_) => ErrorKind::Input,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::from(ArithError::NotPrime(4)).kind().exit_code(), 1);
        let cap = SeriesError::MemoryCap { estimated_bytes: 10, limit_bytes: 1 };
        assert_eq!(Error::from(FglError::Series(cap)).kind().exit_code(), 3);
        assert_eq!(Error::Assertion("x".into()).kind().exit_code(), 2);
    }
}
