use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moebius::Rational;

/// An integer 2x2 matrix of determinant ±1, taken modulo ±I.
///
/// Stored in canonical form: the first nonzero entry in reading order
/// `(a, b, c, d)` is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjMat {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

/// Image of a fraction under a linear fractional map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LftImage {
    pub theta: Rational,
    /// `M·(p, q)` before reduction, sign-normalized so the denominator is positive.
    pub raw: (i64, i64),
}

impl ProjMat {
    pub const IDENTITY: ProjMat = ProjMat { a: 1, b: 0, c: 0, d: 1 };
    /// `theta -> theta / (theta + 1)`.
    pub const A: ProjMat = ProjMat { a: 1, b: 0, c: 1, d: 1 };
    /// `theta -> 1 - theta`, canonical form of `[[-1, 1], [0, 1]]`.
    pub const B: ProjMat = ProjMat { a: 1, b: -1, c: 0, d: -1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 && det != -1 {
            return Err(Error::NotUnimodular { det });
        }
        let first = [a, b, c, d].into_iter().find(|&v| v != 0).unwrap_or(0);
        if first < 0 {
            let neg = |v: i64| v.checked_neg().ok_or(Error::Overflow("matrix negation"));
            Ok(ProjMat { a: neg(a)?, b: neg(b)?, c: neg(c)?, d: neg(d)? })
        } else {
            Ok(ProjMat { a, b, c, d })
        }
    }

    /// Canonical entries `(a, b, c, d)`.
    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    /// The representative whose denominator `c·theta + d` is positive on `[0, 1]`.
    ///
    /// Index and gap-label arithmetic act through this representative. For
    /// matrices with a pole in `[0, 1]` the choice falls back to `d > 0`.
    pub fn oriented(&self) -> (i64, i64, i64, i64) {
        let flip = if self.d != 0 { self.d < 0 } else { self.c < 0 };
        if flip {
            (-self.a, -self.b, -self.c, -self.d)
        } else {
            (self.a, self.b, self.c, self.d)
        }
    }

    pub fn det(&self) -> i64 {
        (self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128) as i64
    }

    pub fn checked_mul(&self, rhs: &ProjMat) -> Result<ProjMat> {
        let ovf = || Error::Overflow("matrix product");
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|l| z.checked_mul(w).and_then(|r| l.checked_add(r)))
                .ok_or_else(ovf)
        };
        ProjMat::new(
            dot(self.a, rhs.a, self.b, rhs.c)?,
            dot(self.a, rhs.b, self.b, rhs.d)?,
            dot(self.c, rhs.a, self.d, rhs.c)?,
            dot(self.c, rhs.b, self.d, rhs.d)?,
        )
    }

    pub fn checked_pow(&self, n: u32) -> Result<ProjMat> {
        let mut out = ProjMat::IDENTITY;
        for _ in 0..n {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    /// Integer inverse (exists since the determinant is ±1).
    pub fn inverse(&self) -> ProjMat {
        let det = self.det();
        ProjMat::new(det * self.d, -det * self.b, -det * self.c, det * self.a)
            .expect("inverse of a unimodular matrix is unimodular")
    }

    /// Unreduced image `M·(p, q)` with positive denominator.
    pub fn act(&self, p: i64, q: i64) -> Result<(i64, i64)> {
        let (a, b, c, d) = self.oriented();
        let num = a as i128 * p as i128 + b as i128 * q as i128;
        let den = c as i128 * p as i128 + d as i128 * q as i128;
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("matrix action"));
        Ok((narrow(num)?, narrow(den)?))
    }

    /// `theta -> (a·theta + b) / (c·theta + d)`, with the unreduced pair.
    pub fn apply(&self, theta: Rational) -> Result<LftImage> {
        let (p, q) = self.act(theta.numer(), theta.denom())?;
        if q == 0 {
            return Err(Error::Pole { matrix: *self, theta });
        }
        Ok(LftImage { theta: Rational::from_wide(p as i128, q as i128)?, raw: (p, q) })
    }

    /// True iff the map has no pole on `[0, 1]` and sends `[0, 1]` into itself.
    ///
    /// A Möbius map without a pole is monotone on the interval, so the images
    /// of the two endpoints decide membership.
    pub fn in_semigroup(&self) -> bool {
        let (a, b, c, d) = self.oriented();
        let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
        let at_one = c + d;
        if d == 0 || at_one == 0 || (d > 0) != (at_one > 0) {
            return false;
        }
        // d > 0 after orientation, so c + d > 0 as well
        (0..=d).contains(&b) && (0..=at_one).contains(&(a + b))
    }
}

impl fmt::Display for ProjMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for ProjMat {
    type Err = Error;

    /// Row-major `"a,b,c,d"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { what: "matrix", input: s.to_string() })?;
        match parts[..] {
            [a, b, c, d] => ProjMat::new(a, b, c, d),
            _ => Err(Error::Parse { what: "matrix", input: s.to_string() }),
        }
    }
}
