use num_bigint::BigInt;
use thiserror::Error;

use crate::Rational;

/// Errors produced by the library.
///
/// The `Undecidable*` variants are only reachable for values of the opaque
/// enclosure kind: rational and quadratic-irrational inputs are always decided
/// exactly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot decide the floor: enclosure still straddles an integer at width {width}")]
    UndecidableFloor { width: Rational },
    #[error("cannot separate the value from a boundary at enclosure width {width}")]
    UndecidableBoundary { width: Rational },
    #[error("enclosure oracle returned [{lo}, {hi}], wider than the requested {requested}")]
    BadEnclosure {
        lo: Box<Rational>,
        hi: Box<Rational>,
        requested: Box<Rational>,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("starting point {x} is not in the set")]
    NotInSet { x: String },
    #[error("progression gap must be nonzero")]
    ZeroGap,
    #[error("unsupported set description: {0}")]
    UnsupportedSpec(String),
    #[error("point has {got} coordinates, set has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypotheses not met: {}", .failed.join(", "))]
    PreconditionUnmet {
        failed: Vec<String>,
        report: Box<crate::escape::ClaimOneReport>,
    },
    #[error("measure of G is {measure}, which is not below xi = {xi}")]
    MeasureTooLarge {
        measure: Box<Rational>,
        xi: Box<Rational>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer {0} does not fit the expected range")]
    Overflow(BigInt),
}

impl Error {
    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UndecidableFloor { .. } => "UndecidableFloor",
            Error::UndecidableBoundary { .. } => "UndecidableBoundary",
            Error::BadEnclosure { .. } => "BadEnclosure",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotInSet { .. } => "NotInSet",
            Error::ZeroGap => "ZeroGap",
            Error::UnsupportedSpec(_) => "UnsupportedSpec",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::PreconditionUnmet { .. } => "PreconditionUnmet",
            Error::MeasureTooLarge { .. } => "MeasureTooLarge",
            Error::Parse(_) => "Parse",
            Error::Overflow(_) => "Overflow",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
