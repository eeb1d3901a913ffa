//! Rational Hofstadter butterfly spectra and their self-similarity maps.

pub mod curves;
pub mod error;
pub mod gaps;
pub mod ids;
pub mod moebius;
pub mod render;
pub mod similarity;
pub mod spectrum;

pub use error::{Error, ErrorKind, Result};
pub use moebius::{ProjMat, Rational};
