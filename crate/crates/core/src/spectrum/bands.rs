use crate::error::{Error, Result};
use crate::moebius::Rational;
use crate::spectrum::charpoly::{diagonal, eval_with_diagonal};


/// Membership tolerance in `x` used throughout.
pub const SPECTRUM_TOL: f64 = 1e-9;

const TOUCH_SNAP: f64 = 1e-6;

/// Edges of the `q` bands of the spectrum at a rational parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpectrum {
    theta: Rational,
    edges: Vec<f64>,
    diag: Vec<f64>,
}

/// Where a point sits relative to the bands; band and gap indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Below,
    Band(usize),
    /// The touching point of bands `k` and `k + 1` (even `q`, `x = 0`).
    Touching(usize),
    /// The open gap between bands `k` and `k + 1`.
    Gap(usize),
    Above,
}

impl BandSpectrum {
    pub fn theta(&self) -> Rational {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// All `2q` edges, ascending.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Band `k` (1-based) as `(lo, hi)`.
    pub fn band(&self, k: usize) -> Result<(f64, f64)> {
        if k == 0 || k > self.len() {
            return Err(Error::IndexOutOfRange { index: k as i64, max: self.len() as i64 });
        }
        Ok((self.edges[2 * k - 2], self.edges[2 * k - 1]))
    }

    pub fn bands(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    /// `(-1)^(q+k)`, the orientation of `P` on band `k`.
    pub fn sign(&self, k: usize) -> f64 {
        if (self.len() + k).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn charpoly(&self, x: f64) -> f64 {
        eval_with_diagonal(&self.diag, x)
    }

    /// `(-1)^(q+k) P(x)`.
    pub fn signed_charpoly(&self, k: usize, x: f64) -> f64 {
        self.sign(k) * self.charpoly(x)
    }

    pub fn contains(&self, x: f64) -> bool {
        matches!(self.locate(x), Location::Band(_) | Location::Touching(_))
    }

    /// Locates `x` with tolerance [`SPECTRUM_TOL`].
    ///
    /// Near an edge shared by two bands within tolerance, the nearer band wins
    /// and an exact tie goes to the right band.
    pub fn locate(&self, x: f64) -> Location {
        let q = self.len();
        if q.is_multiple_of(2) && x.abs() <= SPECTRUM_TOL {
            return Location::Touching(q / 2);
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, (lo, hi)) in self.bands().enumerate() {
            let dist = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            if dist <= SPECTRUM_TOL && best.is_none_or(|(_, d)| dist <= d) {
                best = Some((i + 1, dist));
            }
        }
        if let Some((k, _)) = best {
            return Location::Band(k);
        }
        if x < self.edges[0] {
            return Location::Below;
        }
        if x > self.edges[2 * q - 1] {
            return Location::Above;
        }
        // strictly between some hi_k and lo_{k+1}
        let k = self.edges.chunks_exact(2).take_while(|c| c[1] < x).count();
        Location::Gap(k)
    }

    /// The unique `x` in band `k` with `(-1)^(q+k) P(x) = v`, for `v` in `[-4, 4]`.
    pub fn solve_in_band(&self, k: usize, v: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.band(k)?;
        if !(-4.0..=4.0).contains(&v) {
            return Err(Error::Numerical(format!("level {v} outside [-4, 4]")));
        }
        if v == -4.0 {
            return Ok(lo);
        }
        if v == 4.0 {
            return Ok(hi);
        }
        let s = self.sign(k);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if s * self.charpoly(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and unit
/// off-diagonal, by Sturm-count bisection.
fn path_eigenvalues(d: &[f64]) -> Vec<f64> {
    // number of eigenvalues strictly below x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut piv = 1.0;
        for (i, &di) in d.iter().enumerate() {
            piv = if i == 0 { di - x } else { di - x - 1.0 / piv };
            if piv == 0.0 {
                piv = -f64::EPSILON * (x.abs() + 1.0);
            }
            if piv < 0.0 {
                count += 1;
            }
        }
        count
    };
    (0..d.len())
        .map(|i| {
            let (mut lo, mut hi) = (-4.0f64, 4.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(mid) > i {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Roots of `g = P - level`, the characteristic polynomial of a real periodic
/// tridiagonal matrix with diagonal `diag_matrix`.
///
/// Deleting site 0 leaves a path whose eigenvalues `mu` interlace the roots,
/// so `[mu_(i-1), mu_i]` holds root `i`. Bisection there compares the sign of
/// `g` with the sign it must have just right of root `i`, which is `(-1)^(q-i)`.
/// This stays correct when a root coincides with a bracket end, as it does
/// for eigenvectors vanishing at site 0 and at the double root of even `q`.
fn level_roots(diag_p: &[f64], diag_matrix: &[f64], level: f64) -> Vec<f64> {
    let q = diag_matrix.len();
    let mut cuts = vec![-4.0];
    cuts.extend(path_eigenvalues(&diag_matrix[1..]));
    cuts.push(4.0);
    (1..=q)
        .map(|i| {
            let right_sign = if (q - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            let (mut lo, mut hi) = (cuts[i - 1], cuts[i]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let g = eval_with_diagonal(diag_p, mid) - level;
                if g == 0.0 || g.signum() == right_sign {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// The `2q` band edges: roots of `P - 4` and `P + 4`.
///
/// These are the eigenvalues of `H(0, 0)` and `H(pi/q, pi/q)`. After a gauge
/// change both are real periodic tridiagonal matrices with unit hopping and
/// corner `+1` and `-1` respectively.
pub fn band_edges(theta: Rational) -> Result<BandSpectrum> {
    let q = theta.denom() as usize;
    let diag = diagonal(theta, false);
    let mut edges = if q == 1 {
        vec![-4.0, 4.0]
    } else {
        let mut e = level_roots(&diag, &diag, 4.0);
        e.extend(level_roots(&diag, &diagonal(theta, true), -4.0));
        e
    };
    if edges.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite band edge for {theta}")));
    }
    edges.sort_by(|a, b| a.total_cmp(b));
    if q.is_multiple_of(2) {
        // The middle pair is a double root at 0, which evaluation of P only
        // resolves to about sqrt(eps).
        for e in &mut edges[q - 1..=q] {
            if e.abs() < TOUCH_SNAP {
                *e = 0.0;
            }
        }
    }
    let n = edges.len();
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (edges[i] - edges[n - 1 - i])).collect();
    let spec = BandSpectrum { theta, edges: sym, diag };
    check_structure(&spec)?;
    Ok(spec)
}

fn check_structure(spec: &BandSpectrum) -> Result<()> {
    let q = spec.len();
    let e = &spec.edges;
    for k in 1..q {
        let (hi, next_lo) = (e[2 * k - 1], e[2 * k]);
        let touching = q.is_multiple_of(2) && k == q / 2;
        let ok = if touching { hi == 0.0 && next_lo == 0.0 } else { hi < next_lo };
        if !ok {
            return Err(Error::Numerical(format!(
                "bands {k} and {} of {} are not separated as expected",
                k + 1,
                spec.theta
            )));
        }
    }
    Ok(())
}
