use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A reduced fraction `p/q` in the closed unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    p: i64,
    q: i64,
}

impl Rational {
    pub const ZERO: Rational = Rational { p: 0, q: 1 };
    pub const ONE: Rational = Rational { p: 1, q: 1 };

    /// Reduces `p/q`, normalizing signs. Rejects `q = 0` and values outside `[0, 1]`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        Self::from_wide(p as i128, q as i128)
    }

    pub(crate) fn from_wide(p: i128, q: i128) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("rational"));
        let (p, q) = (narrow(p)?, narrow(q)?);
        if p < 0 || p > q {
            return Err(Error::OutOfUnitInterval { p, q });
        }
        Ok(Rational { p, q })
    }

    pub fn numer(self) -> i64 {
        self.p
    }

    pub fn denom(self) -> i64 {
        self.q
    }

    /// Number of spectral bands at this parameter.
    pub fn bands(self) -> usize {
        self.q as usize
    }

    pub fn value(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `1 - theta`, the vertical flip.
    pub fn complement(self) -> Rational {
        Rational { p: self.q - self.p, q: self.q }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse { what: "fraction", input: s.to_string() };
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: i64 = p.parse().map_err(|_| err())?;
        let q: i64 = q.parse().map_err(|_| err())?;
        Rational::new(p, q)
    }
}

/// All reduced fractions in `[0, 1]` with denominator at most `qmax`, ascending.
pub fn farey(qmax: u32) -> Vec<Rational> {
    let n = qmax.max(1) as i64;
    let mut out = vec![Rational::ZERO];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    while c <= n {
        out.push(Rational { p: c, q: d });
        let k = (n + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    out
}
