use thiserror::Error;

use crate::moebius::{ProjMat, Rational};

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("{p}/{q} lies outside [0, 1]")]
    OutOfUnitInterval { p: i64, q: i64 },

    #[error("matrix determinant is {det}, expected +1 or -1")]
    NotUnimodular { det: i128 },

    #[error("matrix {0} does not map [0, 1] into itself")]
    NotInSemigroup(ProjMat),

    #[error("linear fractional map {matrix} has a pole at theta = {theta}")]
    Pole { matrix: ProjMat, theta: Rational },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("index {index} outside 1..={max}")]
    IndexOutOfRange { index: i64, max: i64 },

    #[error("x = {x} is not in the spectrum at theta = {theta}")]
    NotInSpectrum { x: f64, theta: Rational },

    #[error("r = {r} exceeds r_max = {r_max} for this matrix and sign")]
    OffsetTooLarge { r: u64, r_max: u64 },

    #[error("composition is not of the form S(M, r, sign): {0}")]
    UnsupportedComposition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Numerical(_) | Error::Overflow(_) => ErrorKind::Numerical,
            _ => ErrorKind::InvalidInput,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
