//! Butterfly self-maps `S(M, r, ±)`: a Möbius map in `theta`, a band
//! re-indexing, and the monotone correspondence of characteristic polynomials.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moebius::{LftImage, ProjMat, Rational};
use crate::spectrum::{BandSpectrum, Location, SpectrumCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Offset functional on `(p, q)`: `p` for plus, `q - p` for minus.
    fn functional(self) -> (i128, i128) {
        match self {
            Sign::Plus => (1, 0),
            Sign::Minus => (-1, 1),
        }
    }

    /// `+1.0` or `-1.0`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::Parse { what: "sign", input: s.to_string() }),
        }
    }
}

/// Largest `r` for which `S(M, r, sign)` keeps every band index in range.
///
/// The constraint `r·l(p', q') + q <= q'` reads `r·(linear) <= c theta + d - 1`
/// in `theta`; the ratio is Möbius without a pole on `(0, 1)`, so its minimum
/// sits at an endpoint. A vanishing denominator imposes nothing.
pub fn r_max(m: &ProjMat, sign: Sign) -> Result<u64> {
    if !m.in_semigroup() {
        return Err(Error::NotInSemigroup(*m));
    }
    let (a, b, c, d) = m.oriented();
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    let (l0, l1) = sign.functional();
    let mut best: Option<i128> = None;
    for (num, den) in [
        (d - 1, l0 * b + l1 * d),
        (c + d - 1, l0 * (a + b) + l1 * (c + d)),
    ] {
        if den > 0 {
            let v = num.div_euclid(den);
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    match best {
        // `den = 0` everywhere only for the identity-like index maps
        None => Ok(u64::MAX),
        Some(v) => Ok(v.max(0) as u64),
    }
}

/// The descriptor `(M, r, sign)` of a butterfly self-map.
///
/// With `r = 0` both signs give the same map; the sign is stored as plus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Similarity {
    m: ProjMat,
    r: u64,
    sign: Sign,
}

/// Image of a spectrum point: one point, or two at the even-`q` split of `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedPoint {
    pub theta_out: Rational,
    /// `M·(p, q)` before reduction.
    pub raw: (i64, i64),
    pub points: Vec<f64>,
    /// Band of each point at `theta_out`, 1-based.
    pub bands: Vec<usize>,
}

impl Similarity {
    pub fn new(m: ProjMat, r: u64, sign: Sign) -> Result<Self> {
        let bound = r_max(&m, sign)?;
        if r > bound {
            return Err(Error::OffsetTooLarge { r, r_max: bound });
        }
        let sign = if r == 0 { Sign::Plus } else { sign };
        Ok(Similarity { m, r, sign })
    }

    pub fn identity() -> Self {
        Similarity { m: ProjMat::IDENTITY, r: 0, sign: Sign::Plus }
    }

    pub fn matrix(&self) -> ProjMat {
        self.m
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn target(&self, theta: Rational) -> Result<LftImage> {
        self.m.apply(theta)
    }

    /// Band offset `r·p'` (plus) or `r·(q' - p')` (minus) at `theta`.
    pub fn offset(&self, theta: Rational) -> Result<usize> {
        let (p, q) = self.m.act(theta.numer(), theta.denom())?;
        let base = match self.sign {
            Sign::Plus => p,
            Sign::Minus => q - p,
        };
        Ok(self.r as usize * base as usize)
    }

    /// `k -> k'` for bands at `theta`.
    pub fn map_band_index(&self, theta: Rational, k: usize) -> Result<usize> {
        let q = theta.bands();
        if k == 0 || k > q {
            return Err(Error::IndexOutOfRange { index: k as i64, max: q as i64 });
        }
        let img = self.target(theta)?;
        let k_out = self.offset(theta)? + k;
        debug_assert!(k_out <= img.raw.1 as usize);
        Ok(k_out)
    }

    /// Maps `x` in band `k` at `theta`; returns `(x', k')`.
    pub fn map_in_band(&self, theta: Rational, k: usize, x: f64) -> Result<(f64, usize)> {
        self.map_in_band_with(SpectrumCache::global(), theta, k, x)
    }

    pub fn map_in_band_with(
        &self,
        cache: &SpectrumCache,
        theta: Rational,
        k: usize,
        x: f64,
    ) -> Result<(f64, usize)> {
        let src = cache.get(theta)?;
        let k_out = self.map_band_index(theta, k)?;
        let dst = cache.get(self.target(theta)?.theta)?;
        let v = band_level(&src, k, x)?;
        Ok((dst.solve_in_band(k_out, v)?, k_out))
    }

    /// Maps a spectrum point, splitting `x = 0` for even `q`.
    pub fn map_point(&self, theta: Rational, x: f64) -> Result<MappedPoint> {
        self.map_point_with(SpectrumCache::global(), theta, x)
    }

    pub fn map_point_with(
        &self,
        cache: &SpectrumCache,
        theta: Rational,
        x: f64,
    ) -> Result<MappedPoint> {
        let src = cache.get(theta)?;
        let img = self.target(theta)?;
        let dst = cache.get(img.theta)?;
        let (points, bands) = match src.locate(x) {
            Location::Band(k) => {
                let k_out = self.map_band_index(theta, k)?;
                let v = band_level(&src, k, x)?;
                (vec![dst.solve_in_band(k_out, v)?], vec![k_out])
            }
            Location::Touching(k) => {
                let left = self.map_band_index(theta, k)?;
                let right = left + 1;
                let a = dst.band(left)?.1;
                let b = dst.band(right)?.0;
                if a == b {
                    (vec![a], vec![left])
                } else {
                    (vec![a, b], vec![left, right])
                }
            }
            _ => return Err(Error::NotInSpectrum { x, theta }),
        };
        Ok(MappedPoint { theta_out: img.theta, raw: img.raw, points, bands })
    }

    /// Inverse on one band: the preimage at `theta` of `x_out` in band `k_out`
    /// of the image level; returns `(x, k)`.
    pub fn pull_back(&self, theta: Rational, k_out: usize, x_out: f64) -> Result<(f64, usize)> {
        let cache = SpectrumCache::global();
        let offset = self.offset(theta)?;
        let q = theta.bands();
        if k_out <= offset || k_out - offset > q {
            return Err(Error::IndexOutOfRange { index: k_out as i64, max: (offset + q) as i64 });
        }
        let k = k_out - offset;
        let src = cache.get(theta)?;
        let dst = cache.get(self.target(theta)?.theta)?;
        let v = band_level(&dst, k_out, x_out)?;
        Ok((src.solve_in_band(k, v)?, k))
    }

    /// Applies the map to a butterfly point.
    pub fn apply(&self, pt: ButterflyPoint) -> Result<Vec<ButterflyPoint>> {
        let img = self.map_point(pt.theta, pt.x)?;
        Ok(img.points.iter().map(|&x| ButterflyPoint { theta: img.theta_out, x }).collect())
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{}; r={}; {}]", self.m, self.r, self.sign)
    }
}

/// `(-1)^(q+k) P(x)` clamped to `[-4, 4]`, exact at the band ends.
fn band_level(spec: &BandSpectrum, k: usize, x: f64) -> Result<f64> {
    let (lo, hi) = spec.band(k)?;
    if x <= lo {
        return Ok(-4.0);
    }
    if x >= hi {
        return Ok(4.0);
    }
    Ok(spec.signed_charpoly(k, x).clamp(-4.0, 4.0))
}

/// `outer ∘ inner`.
///
/// The composite matrix is `M_o·M_i`. Offsets are linear functionals of the
/// output pair: the outer one contributes `r_o·l_o`, the inner one
/// `r_i·l_i ∘ M_o^-1`. Their sum must be a non-negative multiple of `p'` or of
/// `q' - p'` to name a single similarity.
pub fn compose(outer: &Similarity, inner: &Similarity) -> Result<Similarity> {
    let m = outer.m.checked_mul(&inner.m)?;
    let (a, b, c, d) = outer.m.oriented();
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    let det = a * d - b * c;
    // inverse of the oriented outer matrix
    let (ia, ib, ic, id) = (det * d, -det * b, -det * c, det * a);
    let (i0, i1) = inner.sign.functional();
    let (o0, o1) = outer.sign.functional();
    let (ri, ro) = (inner.r as i128, outer.r as i128);
    let u0 = ro * o0 + ri * (i0 * ia + i1 * ic);
    let u1 = ro * o1 + ri * (i0 * ib + i1 * id);
    let unsupported = || Error::UnsupportedComposition(format!("{outer} after {inner}"));
    let (r, sign) = if u1 == 0 && u0 >= 0 {
        (u0, Sign::Plus)
    } else if u0 == -u1 && u1 > 0 {
        (u1, Sign::Minus)
    } else {
        return Err(unsupported());
    };
    let r = u64::try_from(r).map_err(|_| unsupported())?;
    Similarity::new(m, r, sign)
}

/// A point `(theta, x)` of the butterfly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButterflyPoint {
    pub theta: Rational,
    pub x: f64,
}

/// The three generating maps: horizontal flip `H`, vertical flip `V = S(B, 0, +)`
/// and the squeeze `S = S(A, 0, +)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    H,
    V,
    S,
}

impl Generator {
    /// The similarity descriptor, for `V` and `S`.
    pub fn similarity(self) -> Option<Similarity> {
        let m = match self {
            Generator::H => return None,
            Generator::V => ProjMat::B,
            Generator::S => ProjMat::A,
        };
        Some(Similarity { m, r: 0, sign: Sign::Plus })
    }

    pub fn apply(self, pt: ButterflyPoint) -> Result<Vec<ButterflyPoint>> {
        match self.similarity() {
            None => Ok(vec![ButterflyPoint { theta: pt.theta, x: -pt.x }]),
            Some(s) => s.apply(pt),
        }
    }
}

/// One step of a composite: the flip `x -> -x` or a similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ButterflyMap {
    Flip,
    Similarity(Similarity),
}

impl From<Generator> for ButterflyMap {
    fn from(g: Generator) -> Self {
        g.similarity().map_or(ButterflyMap::Flip, ButterflyMap::Similarity)
    }
}

impl From<Similarity> for ButterflyMap {
    fn from(s: Similarity) -> Self {
        ButterflyMap::Similarity(s)
    }
}

/// Applies maps right to left (the last entry acts first), collecting every branch.
///
/// The point carries its band through the chain, so only the starting point
/// may split: an intermediate image that lands on a touching point stays in
/// the band it came from. This is the band-wise composition, which agrees with
/// the single similarity named by the product word.
pub fn apply_chain(maps: &[ButterflyMap], pt: ButterflyPoint) -> Result<Vec<ButterflyPoint>> {
    let cache = SpectrumCache::global();
    let start = cache.get(pt.theta)?;
    // flips act on the whole plane, so a point off the spectrum has no band
    // until a similarity needs one
    let mut states: Vec<(Rational, Option<usize>, f64)> = match start.locate(pt.x) {
        Location::Band(k) => vec![(pt.theta, Some(k), pt.x)],
        Location::Touching(k) => vec![(pt.theta, Some(k), 0.0), (pt.theta, Some(k + 1), 0.0)],
        _ => vec![(pt.theta, None, pt.x)],
    };
    for step in maps.iter().rev() {
        for st in states.iter_mut() {
            let (theta, k, x) = *st;
            *st = match (step, k) {
                (ButterflyMap::Flip, _) => (theta, k.map(|k| theta.bands() + 1 - k), -x),
                (ButterflyMap::Similarity(s), Some(k)) => {
                    let (x_out, k_out) = s.map_in_band_with(cache, theta, k, x)?;
                    (s.target(theta)?.theta, Some(k_out), x_out)
                }
                (ButterflyMap::Similarity(_), None) => return Err(Error::NotInSpectrum { x, theta }),
            };
        }
    }
    let mut out: Vec<ButterflyPoint> = Vec::with_capacity(states.len());
    for (theta, _, x) in states {
        let p = ButterflyPoint { theta, x };
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// [`apply_chain`] for a word in the generators.
pub fn apply_word(word: &[Generator], pt: ButterflyPoint) -> Result<Vec<ButterflyPoint>> {
    let maps: Vec<ButterflyMap> = word.iter().map(|&g| g.into()).collect();
    apply_chain(&maps, pt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> ProjMat {
        ProjMat::new(a, b, c, d).unwrap()
    }

    #[test]
    fn r_max_examples() {
        assert_eq!(r_max(&m(1, 0, 2, 1), Sign::Plus).unwrap(), 2);
        assert_eq!(r_max(&ProjMat::IDENTITY, Sign::Plus).unwrap(), 0);
        assert_eq!(r_max(&m(1, 1, 2, 3), Sign::Plus).unwrap(), 2);
        assert_eq!(r_max(&ProjMat::A, Sign::Plus).unwrap(), 1);
        assert_eq!(r_max(&m(0, 1, -1, 3), Sign::Minus).unwrap(), 1);
        assert!(r_max(&m(-1, 0, 2, 1), Sign::Plus).is_err());
    }

    // brute force: largest r with r·l(p', q') + q <= q' over farey(30)
    fn r_max_oracle(mat: &ProjMat, sign: Sign) -> u64 {
        let mut best = u64::MAX;
        for t in crate::moebius::farey(30) {
            let (p, q) = mat.act(t.numer(), t.denom()).unwrap();
            let l = match sign {
                Sign::Plus => p,
                Sign::Minus => q - p,
            };
            if l > 0 {
                best = best.min(((q - t.denom()) / l) as u64);
            }
        }
        best
    }

    #[test]
    fn r_max_matches_oracle() {
        for mat in [m(1, 0, 2, 1), m(1, 1, 2, 3), m(-1, 2, -2, 3), m(0, 1, -1, 3), m(2, 1, 3, 2)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let want = r_max_oracle(&mat, sign);
                let got = r_max(&mat, sign).unwrap();
                assert_eq!(got.min(1000), want.min(1000), "{mat} {sign}");
            }
        }
    }

    #[test]
    fn rejects_large_offset() {
        assert!(matches!(
            Similarity::new(ProjMat::IDENTITY, 1, Sign::Plus),
            Err(Error::OffsetTooLarge { r: 1, r_max: 0 })
        ));
    }

    #[test]
    fn band_index_examples() {
        let s = Similarity::new(m(1, 0, 2, 1), 1, Sign::Plus).unwrap();
        assert_eq!(s.map_band_index(r(1, 3), 2).unwrap(), 3);
        let id = Similarity::identity();
        assert_eq!(id.map_band_index(r(2, 7), 5).unwrap(), 5);
        let fig6 = Similarity::new(m(0, 1, -1, 3), 1, Sign::Minus).unwrap();
        // theta = 1/2 -> (2, 5)
        assert_eq!(fig6.target(r(1, 2)).unwrap().raw, (2, 5));
        assert_eq!(fig6.map_band_index(r(1, 2), 1).unwrap(), 4);
        assert!(s.map_band_index(r(1, 3), 4).is_err());
    }

    #[test]
    fn cubic_point_images() {
        let s = Similarity::new(m(1, 0, 2, 1), 1, Sign::Plus).unwrap();
        let img = s.map_point(Rational::ONE, 0.0).unwrap();
        assert_eq!(img.theta_out, r(1, 3));
        assert!(img.points[0].abs() < 1e-12);
        let img = s.map_point(Rational::ONE, 4.0).unwrap();
        assert!((img.points[0] - (3f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn split_at_zero() {
        let s = Similarity::new(ProjMat::A, 0, Sign::Plus).unwrap();
        let img = s.map_point(r(1, 2), 0.0).unwrap();
        assert_eq!(img.theta_out, r(1, 3));
        assert_eq!(img.bands, [1, 2]);
        let third = crate::spectrum::band_edges(r(1, 3)).unwrap();
        assert_eq!(img.points, [third.band(1).unwrap().1, third.band(2).unwrap().0]);
    }

    #[test]
    fn pull_back_inverts() {
        let s = Similarity::new(m(1, 1, 2, 3), 2, Sign::Plus).unwrap();
        let theta = r(2, 5);
        let spec = crate::spectrum::band_edges(theta).unwrap();
        for k in 1..=5 {
            let (lo, hi) = spec.band(k).unwrap();
            let x = lo + 0.3 * (hi - lo);
            let (x_out, k_out) = s.map_in_band(theta, k, x).unwrap();
            let (back, kb) = s.pull_back(theta, k_out, x_out).unwrap();
            assert_eq!(kb, k);
            assert!((back - x).abs() < 1e-9 * (hi - lo).max(1e-3));
        }
    }

    #[test]
    fn not_in_spectrum() {
        let s = Similarity::identity();
        assert!(matches!(s.map_point(r(1, 3), 1.0), Err(Error::NotInSpectrum { .. })));
    }

    #[test]
    fn composition_patterns() {
        let a0 = Similarity::new(ProjMat::A, 0, Sign::Plus).unwrap();
        let a1 = Similarity::new(ProjMat::A, 1, Sign::Plus).unwrap();
        let want = Similarity::new(m(1, 0, 2, 1), 1, Sign::Plus).unwrap();
        assert_eq!(compose(&a0, &a1).unwrap(), want);
        let s = Similarity::new(m(1, 1, 2, 3), 1, Sign::Plus).unwrap();
        assert_eq!(compose(&Similarity::identity(), &s).unwrap(), s);
        assert_eq!(compose(&s, &Similarity::identity()).unwrap(), s);
        let v = Generator::V.similarity().unwrap();
        let bab = ProjMat::B.checked_mul(&ProjMat::A).unwrap().checked_mul(&ProjMat::B).unwrap();
        let got = compose(&v, &compose(&a0, &v).unwrap()).unwrap();
        assert_eq!(got, Similarity::new(bab, 0, Sign::Minus).unwrap());
        let got = compose(&v, &compose(&a1, &v).unwrap()).unwrap();
        assert_eq!(got, Similarity::new(bab, 1, Sign::Minus).unwrap());
        assert_eq!(got.sign(), Sign::Minus);
    }

    #[test]
    fn unsupported_composition() {
        // the inner offset p' pulls back to 3p'' - q'', neither p'' nor q'' - p''
        let inner = Similarity::new(ProjMat::A, 1, Sign::Plus).unwrap();
        let outer = Similarity::new(m(1, 1, 2, 3), 0, Sign::Plus).unwrap();
        assert!(matches!(compose(&outer, &inner), Err(Error::UnsupportedComposition(_))));
    }

    #[test]
    fn generators_on_points() {
        let pt = ButterflyPoint { theta: r(2, 5), x: 1.25 };
        assert_eq!(apply_word(&[Generator::H, Generator::H], pt).unwrap(), [pt]);
        let spec = crate::spectrum::band_edges(r(1, 3)).unwrap();
        let (lo, hi) = spec.band(3).unwrap();
        let x = 0.5 * (lo + hi);
        let img = Generator::V.apply(ButterflyPoint { theta: r(1, 3), x }).unwrap();
        assert_eq!(img[0].theta, r(2, 3));
        assert!((img[0].x - x).abs() < 1e-12);
    }

    #[test]
    fn chain_keeps_bands_through_touching_points() {
        // S sends the top of 0/1 to the touching point of 1/2; a second S
        // must follow band 2 there rather than split again
        use Generator::{S, V};
        let pt = ButterflyPoint { theta: r(0, 1), x: 4.0 };
        let lhs = apply_word(&[V, S, S, V], pt).unwrap();
        let conj = ProjMat::B.checked_mul(&m(1, 0, 2, 1)).unwrap().checked_mul(&ProjMat::B).unwrap();
        let rhs = Similarity::new(conj, 0, Sign::Minus).unwrap().apply(pt).unwrap();
        assert_eq!(lhs.len(), 1);
        assert_eq!(lhs[0].theta, rhs[0].theta);
        assert!((lhs[0].x - rhs[0].x).abs() < 1e-12);
        // a touching start still splits
        let split = apply_word(&[S], ButterflyPoint { theta: r(1, 2), x: 0.0 }).unwrap();
        assert_eq!(split.len(), 2);
    }
}
