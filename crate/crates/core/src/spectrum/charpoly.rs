use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero, One};

use crate::error::{Error, Result};
use crate::moebius::Rational;
use crate::spectrum::dd::Dd;

/// `2 cos(pi m / n)`, exact at the zeros and odd about `m = n/2`.
pub(crate) fn two_cos_pi_frac(m: i64, n: i64) -> f64 {
    let period = 2 * n;
    let mut m = m.rem_euclid(period);
    if m > n {
        m = period - m;
    }
    2.0 * (PI * (n - 2 * m) as f64 / (2 * n) as f64).sin()
}

/// Diagonal of `H(0, k2)`; `half_shift` selects `k2 = pi/q` instead of `k2 = 0`.
pub(crate) fn diagonal(theta: Rational, half_shift: bool) -> Vec<f64> {
    let (p, q) = (theta.numer(), theta.denom());
    (0..q)
        .map(|j| {
            let m = 2 * ((p * j) % q) + i64::from(half_shift);
            two_cos_pi_frac(m, q)
        })
        .collect()
}

/// Above this size the transfer recurrence runs in double-double arithmetic.
const COMPENSATED_ABOVE: i64 = 32;

/// `P_theta(x) = det(x - H(0,0)) + 4`, via `tr(T_{q-1} ... T_0) + 2` with
/// `T_j = [[x - d_j, -1], [1, 0]]`.
pub fn charpoly_eval(theta: Rational, x: f64) -> f64 {
    eval_with_diagonal(&diagonal(theta, false), x)
}

pub(crate) fn eval_with_diagonal(diag: &[f64], x: f64) -> f64 {
    if diag.len() as i64 > COMPENSATED_ABOVE {
        return eval_dd(diag, x);
    }
    // columns of the running product
    let (mut a0, mut b0, mut a1, mut b1) = (1.0, 0.0, 0.0, 1.0);
    for &d in diag {
        let s = x - d;
        (a0, b0) = (s * a0 - b0, a0);
        (a1, b1) = (s * a1 - b1, a1);
    }
    a0 + b1 + 2.0
}

pub(crate) fn eval_dd(diag: &[f64], x: f64) -> f64 {
    let one = Dd::new(1.0);
    let zero = Dd::new(0.0);
    let (mut a0, mut b0, mut a1, mut b1) = (one, zero, zero, one);
    for &d in diag {
        let s = Dd::two_sum(x, -d);
        (a0, b0) = (s.mul(a0).add(b0.neg()), a0);
        (a1, b1) = (s.mul(a1).add(b1.neg()), a1);
    }
    let t = a0.add(b1).add(Dd::new(2.0));
    t.hi + t.lo
}

/// Monic characteristic polynomial `P_theta`, coefficients from highest degree down.
///
/// The coefficients lie in `Z[2 cos(2 pi / q)]`. Each is kept exactly as an
/// integer combination of powers of a primitive `q`-th root of unity, reduced
/// modulo the cyclotomic polynomial, next to its numerical value. They are
/// ordinary integers when `q` is 1, 2, 3, 4 or 6.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub theta: Rational,
    /// Numerical values, highest degree first.
    pub coeffs: Vec<f64>,
    exact: Vec<Vec<BigInt>>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^(degree - i)` as powers `zeta^0, zeta^1, ...` of the root of unity.
    pub fn exact_coeff(&self, i: usize) -> &[BigInt] {
        &self.exact[i]
    }

    pub fn is_integral(&self) -> bool {
        self.exact.iter().all(|c| c.iter().skip(1).all(Zero::is_zero))
    }

    /// Integer coefficients, when every coefficient is rational.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.exact.iter().map(|c| c[0].clone()).collect())
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.integer_coeffs()?.iter().map(|c| c.to_i64()).collect()
    }

    /// Horner evaluation from the numerical coefficients; loses accuracy for
    /// large `q`, where [`charpoly_eval`] should be preferred.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * x + c)
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let ints = self.integer_coeffs();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let is_zero = match &ints {
                Some(v) => v[i].is_zero(),
                None => c == 0.0,
            };
            if is_zero {
                continue;
            }
            let pow = n - i;
            let neg = match &ints {
                Some(v) => v[i].is_negative(),
                None => c < 0.0,
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = match &ints {
                Some(v) => v[i].abs().to_string(),
                None => format!("{:.12}", c.abs()),
            };
            if mag != "1" || pow == 0 {
                f.write_str(&mag)?;
            }
            match pow {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{pow}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

// Elements of Z[y]/(y^q - 1), stored densely.
type Ring = Vec<BigInt>;

fn ring_zero(q: usize) -> Ring {
    vec![BigInt::zero(); q]
}

/// Polynomials in x over the ring, lowest degree first.
type RingPoly = Vec<Ring>;

/// `(x - (y^e + y^-e)) * a - b`
fn transfer_step(a: &RingPoly, b: &RingPoly, e: usize, q: usize) -> RingPoly {
    let mut out: RingPoly = vec![ring_zero(q); a.len() + 1];
    for (deg, coef) in a.iter().enumerate() {
        for (k, v) in coef.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            out[deg + 1][k] += v;
            out[deg][(k + e) % q] -= v;
            out[deg][(k + q - e) % q] -= v;
        }
    }
    for (deg, coef) in b.iter().enumerate() {
        for (k, v) in coef.iter().enumerate() {
            out[deg][k] -= v;
        }
    }
    out
}

/// Dense integer polynomial, lowest degree first.
fn poly_divrem(num: &[BigInt], den: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    if num.len() <= dn {
        return (vec![BigInt::zero()], rem);
    }
    let lead = &den[dn];
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dn] / lead;
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
        quot[i] = c;
    }
    rem.truncate(dn.max(1));
    (quot, rem)
}

fn cyclotomic(n: usize) -> Vec<BigInt> {
    // y^n - 1 divided by all proper-divisor cyclotomics
    let mut poly = vec![BigInt::zero(); n + 1];
    poly[0] = -BigInt::one();
    poly[n] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        poly = poly_divrem(&poly, &cyclotomic(d)).0;
    }
    poly
}

/// Value at `zeta = e^(2 pi i / q)` of a real element of `Z[zeta]`, with the
/// sum of absolute term sizes as an error scale.
fn at_root(elem: &[BigInt], q: usize) -> (f64, f64) {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (k, v) in elem.iter().enumerate() {
        let term = v.to_f64().unwrap_or(f64::INFINITY) * 0.5 * two_cos_pi_frac(2 * k as i64, q as i64);
        sum += term;
        scale += term.abs();
    }
    (sum, scale)
}

/// Exact coefficients of `P_theta`.
///
/// The transfer-matrix trace is expanded over `Z[y]/(y^q - 1)`, with the
/// diagonal entry `2 cos(2 pi p j / q)` standing for `y^(pj) + y^(-pj)`; each
/// coefficient is then reduced modulo the cyclotomic polynomial. The result is
/// cross-checked against [`charpoly_eval`] at `x = -4..=4`.
pub fn charpoly_coeffs(theta: Rational) -> Result<CharPoly> {
    let q = theta.denom() as usize;
    let p = theta.numer() as usize;
    let unit = || {
        let mut r = ring_zero(q);
        r[0] = BigInt::one();
        vec![r]
    };
    let zero = || vec![ring_zero(q)];
    let (mut a0, mut b0, mut a1, mut b1) = (unit(), zero(), zero(), unit());
    for j in 0..q {
        let e = (p * j) % q;
        let n0 = transfer_step(&a0, &b0, e, q);
        let n1 = transfer_step(&a1, &b1, e, q);
        (a0, b0) = (n0, a0);
        (a1, b1) = (n1, a1);
    }
    let phi = cyclotomic(q);
    let mut exact = Vec::with_capacity(q + 1);
    for deg in 0..=q {
        let mut elem = ring_zero(q);
        for (k, v) in elem.iter_mut().enumerate() {
            if let Some(r) = a0.get(deg) {
                *v += &r[k];
            }
            if let Some(r) = b1.get(deg) {
                *v += &r[k];
            }
        }
        if deg == 0 {
            elem[0] += 2;
        }
        exact.push(poly_divrem(&elem, &phi).1);
    }
    exact.reverse();
    let coeffs = exact.iter().map(|c| at_root(c, q).0).collect();
    let poly = CharPoly { theta, coeffs, exact };
    verify(&poly)?;
    Ok(poly)
}

fn verify(poly: &CharPoly) -> Result<()> {
    let q = poly.degree();
    for x in -4i64..=4 {
        let bx = BigInt::from(x);
        let zero = vec![BigInt::zero(); poly.exact[0].len()];
        let value = poly.exact.iter().fold(zero, |acc, c| {
            let mut out: Vec<BigInt> = acc.iter().map(|a| a * &bx).collect();
            if out.len() < c.len() {
                out.resize(c.len(), BigInt::zero());
            }
            for (o, ci) in out.iter_mut().zip(c) {
                *o += ci;
            }
            out
        });
        let (exact, scale) = at_root(&value, q);
        let approx = charpoly_eval(poly.theta, x as f64);
        let resid = (exact - approx).abs();
        let tol = 1e-6 * exact.abs().max(1.0) + 1e-12 * scale;
        if !(resid <= tol) {
            return Err(Error::Numerical(format!(
                "coefficients for {} disagree with evaluation at x = {x} (residual {resid:e})",
                poly.theta
            )));
        }
    }
    Ok(())
}
