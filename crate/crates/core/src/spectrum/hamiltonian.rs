use num_complex::Complex64;

use crate::moebius::Rational;
use crate::spectrum::charpoly::{diagonal, eval_dd};
use crate::spectrum::dd::CDd;

/// The `q x q` Harper matrix `H(k1, k2)` in row-major order.
///
/// Diagonal `2 cos(2 pi p j / q + k2)`, hopping `e^{i k1}` from site `j` to
/// `j + 1` (cyclically) and its conjugate back. For `q <= 2` the contributions
/// to a shared entry add up.
pub fn hamiltonian(theta: Rational, k1: f64, k2: f64) -> Vec<Vec<Complex64>> {
    let q = theta.denom() as usize;
    let p = theta.numer() as usize;
    let mut h = vec![vec![Complex64::new(0.0, 0.0); q]; q];
    let fwd = Complex64::from_polar(1.0, k1);
    for j in 0..q {
        let phase = 2.0 * std::f64::consts::PI * ((p * j) % q) as f64 / q as f64 + k2;
        h[j][j] += 2.0 * phase.cos();
        h[(j + 1) % q][j] += fwd;
        h[j][(j + 1) % q] += fwd.conj();
    }
    h
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap_or(col);
        if m[piv][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pv = m[col][col];
        det *= pv;
        for row in col + 1..n {
            let f = m[row][col] / pv;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let sub = f * m[col][c];
                m[row][c] -= sub;
            }
        }
    }
    det
}

/// [`complex_det`] in double-double arithmetic.
fn complex_det_dd(mut m: Vec<Vec<CDd>>) -> CDd {
    let n = m.len();
    let mut det = CDd::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm_sqr().total_cmp(&m[b][col].norm_sqr()))
            .unwrap_or(col);
        if m[piv][col].norm_sqr() == 0.0 {
            return CDd::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = det.neg();
        }
        let pv = m[col][col];
        det = det.mul(pv);
        for row in col + 1..n {
            let f = m[row][col].div(pv);
            for c in col..n {
                m[row][c] = m[row][c].sub(f.mul(m[col][c]));
            }
        }
    }
    det
}

/// `det(x - H(k1, k2)) + 2 cos(q k1) + 2 cos(q k2) - P_theta(x)`, identically zero.
///
/// Both the determinant and `P` are evaluated in double-double arithmetic, so
/// the residual reflects only the rounding of the matrix entries.
pub fn chambers_residual(theta: Rational, x: f64, k1: f64, k2: f64) -> f64 {
    let q = theta.denom() as usize;
    let h = hamiltonian(theta, k1, k2);
    let m: Vec<Vec<CDd>> = h
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    let e = CDd::new(-v.re, -v.im);
                    if i == j {
                        e.add(CDd::new(x, 0.0))
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let det = complex_det_dd(m).re;
    let qf = q as f64;
    let p = eval_dd(&diagonal(theta, false), x);
    det.to_f64() + 2.0 * (qf * k1).cos() + 2.0 * (qf * k2).cos() - p
}
