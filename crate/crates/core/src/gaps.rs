//! Gap labels `(s, t)` with `k = t·p - s·q`, and their transport under similarities.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::moebius::Rational;
use crate::similarity::{Sign, Similarity};
use crate::spectrum::SpectrumCache;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapLabel {
    pub s: i64,
    pub t: i64,
}

impl GapLabel {
    pub fn new(s: i64, t: i64) -> Self {
        GapLabel { s, t }
    }

    /// `t·p - s·q`.
    pub fn gap_index(&self, theta: Rational) -> i64 {
        self.t * theta.numer() - self.s * theta.denom()
    }

    /// `0 <= s <= t - 1` for `t > 0`, `t <= s <= -1` for `t < 0`.
    pub fn in_range(&self) -> bool {
        match self.t.cmp(&0) {
            std::cmp::Ordering::Greater => 0 <= self.s && self.s < self.t,
            std::cmp::Ordering::Less => self.t <= self.s && self.s <= -1,
            std::cmp::Ordering::Equal => false,
        }
    }
}

impl fmt::Display for GapLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.t)
    }
}

/// Canonical label of gap `k` (between bands `k` and `k + 1`).
///
/// `t = k·p^-1 mod q`, lifted to `(-q/2, q/2]`, then `s = (t·p - k)/q`.
pub fn label_gap(theta: Rational, k: i64) -> Result<GapLabel> {
    let (p, q) = (theta.numer(), theta.denom());
    if k < 1 || k > q - 1 {
        return Err(Error::IndexOutOfRange { index: k, max: q - 1 });
    }
    // q >= 2 here, so p is a unit mod q
    let inv = p.extended_gcd(&q).x.rem_euclid(q);
    let mut t = ((k as i128 * inv as i128).rem_euclid(q as i128)) as i64;
    if 2 * t > q {
        t -= q;
    }
    let num = t as i128 * p as i128 - k as i128;
    debug_assert_eq!(num.rem_euclid(q as i128), 0);
    let s = (num / q as i128) as i64;
    Ok(GapLabel { s, t })
}

/// Label transport before canonicalization: `det(M)·M·(s, t)` plus
/// `(0, r)` for the plus sign or `(-r, -r)` for the minus sign.
///
/// `M` acts through its orientation-normalized representative, the same one
/// that produces the unreduced image pair `(p', q')`.
pub fn transport_raw(sim: &Similarity, label: GapLabel) -> Result<GapLabel> {
    let (a, b, c, d) = sim.matrix().oriented();
    let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
    let (s, t) = (label.s as i128, label.t as i128);
    let r = sim.r() as i128;
    let (os, ot) = match sim.sign() {
        Sign::Plus => (0, r),
        Sign::Minus => (-r, -r),
    };
    let s2 = det * (a as i128 * s + b as i128 * t) + os;
    let t2 = det * (c as i128 * s + d as i128 * t) + ot;
    let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("gap label"));
    Ok(GapLabel { s: narrow(s2)?, t: narrow(t2)? })
}

/// A transported label at the image parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransportedLabel {
    pub theta_out: Rational,
    pub raw: GapLabel,
    pub gap_index: i64,
    pub canonical: GapLabel,
}

pub fn transport_label(
    sim: &Similarity,
    theta: Rational,
    label: GapLabel,
) -> Result<TransportedLabel> {
    let theta_out = sim.target(theta)?.theta;
    let raw = transport_raw(sim, label)?;
    let gap_index = raw.gap_index(theta_out);
    let canonical = label_gap(theta_out, gap_index)?;
    Ok(TransportedLabel { theta_out, raw, gap_index, canonical })
}

/// One row of the gap table: label and the open interval between bands `k`, `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub k: i64,
    pub label: GapLabel,
    pub lo: f64,
    pub hi: f64,
}

pub fn gap_table(theta: Rational) -> Result<Vec<GapRow>> {
    let spec = SpectrumCache::global().get(theta)?;
    let q = theta.denom();
    (1..q)
        .map(|k| {
            let lo = spec.band(k as usize)?.1;
            let hi = spec.band(k as usize + 1)?.0;
            Ok(GapRow { k, label: label_gap(theta, k)?, lo, hi })
        })
        .collect()
}
