//! Integrated density of states of the free operator and the rational trace formula.

use std::f64::consts::PI;

use crate::error::Result;
use crate::moebius::Rational;
use crate::spectrum::{Location, SpectrumCache};

/// Evaluates `F(x)`, the normalized area of `{(s, t) in [0, pi]^2 : 2 cos s + 2 cos t < x}`.
#[derive(Debug, Clone)]
pub struct IdsEvaluator {
    tol: f64,
    /// Increasing samples `(x, F(x))` on `[-4, 4]`, used to bracket inversions.
    table: Option<Vec<(f64, f64)>>,
}

impl Default for IdsEvaluator {
    fn default() -> Self {
        IdsEvaluator { tol: 1e-12, table: None }
    }
}

impl IdsEvaluator {
    /// Absolute error target for the quadrature.
    pub fn with_tolerance(tol: f64) -> Self {
        IdsEvaluator { tol, table: None }
    }

    /// Adds an `n`-point inversion table.
    pub fn with_table(mut self, n: usize) -> Self {
        let n = n.max(2);
        let table = (0..n)
            .map(|i| {
                let x = -4.0 + 8.0 * i as f64 / (n - 1) as f64;
                (x, self.f(x))
            })
            .collect();
        self.table = Some(table);
        self
    }

    /// `F(x) = pi^-2 ∫_0^pi [pi - arccos(clamp((x - 2 cos t)/2))] dt`.
    ///
    /// The integrand has square-root kinks where `|x - 2 cos t| = 2`; the range
    /// is split there and each piece integrated by double-exponential quadrature.
    pub fn f(&self, x: f64) -> f64 {
        if x <= -4.0 {
            return 0.0;
        }
        if x >= 4.0 {
            return 1.0;
        }
        let integrand = |t: f64| {
            let y = ((x - 2.0 * t.cos()) / 2.0).clamp(-1.0, 1.0);
            PI - y.acos()
        };
        let mut cuts = vec![0.0];
        for c in [(x - 2.0) / 2.0, (x + 2.0) / 2.0] {
            if c > -1.0 && c < 1.0 {
                cuts.push(c.acos());
            }
        }
        cuts.push(PI);
        cuts.sort_by(|a, b| a.total_cmp(b));
        let pieces = (cuts.len() - 1) as f64;
        let total: f64 = cuts
            .windows(2)
            .map(|w| quadrature::integrate(integrand, w[0], w[1], self.tol / pieces).integral)
            .sum();
        (total / (PI * PI)).clamp(0.0, 1.0)
    }

    /// The `x` with `F(x) = y`, for `y` in `[0, 1]`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return -4.0;
        }
        if y >= 1.0 {
            return 4.0;
        }
        let (mut lo, mut hi) = match &self.table {
            Some(tab) => {
                let i = tab.partition_point(|&(_, v)| v < y).clamp(1, tab.len() - 1);
                (tab[i - 1].0, tab[i].0)
            }
            None => (-4.0, 4.0),
        };
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.f(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `F(x)` with the default tolerance.
pub fn ids_f(x: f64) -> f64 {
    IdsEvaluator::default().f(x)
}

/// Normalized trace of the spectral projection onto `(-inf, x)` at `theta`:
/// `(k - 1)/q + F((-1)^(q+k) P(x))/q` inside band `k`, `k/q` in the gap after it.
pub fn trace_below(theta: Rational, x: f64) -> Result<f64> {
    trace_below_with(&IdsEvaluator::default(), theta, x)
}

pub fn trace_below_with(ids: &IdsEvaluator, theta: Rational, x: f64) -> Result<f64> {
    let spec = SpectrumCache::global().get(theta)?;
    let q = spec.len() as f64;
    Ok(match spec.locate(x) {
        Location::Below => 0.0,
        Location::Above => 1.0,
        Location::Gap(k) | Location::Touching(k) => k as f64 / q,
        Location::Band(k) => {
            let (lo, hi) = spec.band(k)?;
            let v = if x <= lo {
                -4.0
            } else if x >= hi {
                4.0
            } else {
                spec.signed_charpoly(k, x).clamp(-4.0, 4.0)
            };
            (k as f64 - 1.0) / q + ids.f(v) / q
        }
    })
}
