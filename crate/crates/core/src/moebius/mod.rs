//! Exact fractions, unimodular matrices and the semigroup of maps `[0, 1] -> [0, 1]`.

mod matrix;
mod rational;
mod word;

pub use matrix::{LftImage, ProjMat};
pub use rational::{farey, Rational};
pub use word::{factor_word, GeneratorWord, Letter};

use crate::error::Result;

/// Reduced `p/q` in `[0, 1]`.
pub fn reduce(p: i64, q: i64) -> Result<Rational> {
    Rational::new(p, q)
}

/// `theta -> (a theta + b)/(c theta + d)`.
pub fn lft_apply(m: &ProjMat, theta: Rational) -> Result<LftImage> {
    m.apply(theta)
}
