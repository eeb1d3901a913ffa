//! Zero sets of `P_theta(x) + sign·P_theta'(y)` on `[-4, 4]^2` by marching squares.
//!
//! Pieces of the curve that leave the box are reconnected analytically: outside
//! the box one of the two polynomials is monotone, so every strip along a side
//! (and every corner quadrant) holds at most one arc per sign interval.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moebius::Rational;
use crate::similarity::Sign;
use crate::spectrum::{charpoly_eval, SpectrumCache, SPECTRUM_TOL};

/// Smallest grid accepted by [`trace_curve`].
pub const MIN_GRID: usize = 64;

/// Default grid resolution.
pub const DEFAULT_GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl Segment {
    pub fn midpoint(&self) -> (f64, f64) {
        (0.5 * (self.a.0 + self.b.0), 0.5 * (self.a.1 + self.b.1))
    }

    fn distance_to(&self, p: (f64, f64)) -> f64 {
        let (dx, dy) = (self.b.0 - self.a.0, self.b.1 - self.a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.0 - self.a.0) * dx + (p.1 - self.a.1) * dy) / len2).clamp(0.0, 1.0)
        };
        let (cx, cy) = (self.a.0 + t * dx, self.a.1 + t * dy);
        ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct ImplicitCurve {
    pub theta: Rational,
    pub theta_prime: Rational,
    pub sign: Sign,
    pub n: usize,
    pub restricted: bool,
    /// In row-major cell order.
    pub segments: Vec<Segment>,
    /// Component id of each segment, numbered by first appearance.
    pub component: Vec<usize>,
    pub component_count: usize,
    /// Vertex keys of each segment; equal keys are the same point.
    ends: Vec<[u64; 2]>,
    /// Grid cell `(i, j)` of each segment.
    cells: Vec<(u32, u32)>,
}

impl ImplicitCurve {
    /// Segment indices grouped by component.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (i, &c) in self.component.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Grid spacing.
    pub fn cell(&self) -> f64 {
        8.0 / self.n as f64
    }

    /// `P_theta(x) + sign·P_theta'(y)`.
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        charpoly_eval(self.theta, x) + self.sign.value() * charpoly_eval(self.theta_prime, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    /// Invariant under `(x, y) -> (-x, -y)`.
    Odd,
    /// Invariant under both axis flips.
    Even4,
    Other,
}

impl std::fmt::Display for Symmetry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Symmetry::Odd => "odd",
            Symmetry::Even4 => "even4",
            Symmetry::Other => "other",
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, which keeps labelling independent of merge order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Dense ids for vertex keys, in order of first use.
#[derive(Default)]
struct KeyIndex {
    ids: HashMap<u64, usize>,
}

impl KeyIndex {
    fn id(&mut self, key: u64) -> usize {
        let next = self.ids.len();
        *self.ids.entry(key).or_insert(next)
    }

    fn get(&self, key: u64) -> Option<usize> {
        self.ids.get(&key).copied()
    }
}

struct Grid {
    n: usize,
    xs: Vec<f64>,
    px: Vec<f64>,
    py: Vec<f64>,
    s: f64,
}

impl Grid {
    fn f(&self, i: usize, j: usize) -> f64 {
        self.px[i] + self.s * self.py[j]
    }

    fn node_key(&self, i: usize, j: usize) -> u64 {
        let n1 = (self.n + 1) as u64;
        2 * n1 * n1 + j as u64 * n1 + i as u64
    }

    /// Horizontal edge from node `(i, j)` to `(i + 1, j)`.
    fn h_key(&self, i: usize, j: usize) -> u64 {
        2 * (j as u64 * (self.n + 1) as u64 + i as u64)
    }

    /// Vertical edge from node `(i, j)` to `(i, j + 1)`.
    fn v_key(&self, i: usize, j: usize) -> u64 {
        self.h_key(i, j) + 1
    }

    /// Crossing on the edge between nodes `n0` and `n1`; a zero at a node is keyed by the node.
    fn crossing(&self, n0: (usize, usize), n1: (usize, usize), edge: u64) -> (u64, (f64, f64)) {
        let (f0, f1) = (self.f(n0.0, n0.1), self.f(n1.0, n1.1));
        if f0 == 0.0 {
            return (self.node_key(n0.0, n0.1), (self.xs[n0.0], self.xs[n0.1]));
        }
        if f1 == 0.0 {
            return (self.node_key(n1.0, n1.1), (self.xs[n1.0], self.xs[n1.1]));
        }
        let t = f0 / (f0 - f1);
        let x = self.xs[n0.0] + t * (self.xs[n1.0] - self.xs[n0.0]);
        let y = self.xs[n0.1] + t * (self.xs[n1.1] - self.xs[n0.1]);
        (edge, (x, y))
    }

    /// Segments of cell `(i, j)` as `(key, point)` pairs.
    fn cell(&self, i: usize, j: usize) -> Vec<[(u64, (f64, f64)); 2]> {
        let nodes = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let pos: Vec<bool> = nodes.iter().map(|&(a, b)| self.f(a, b) > 0.0).collect();
        let code = pos.iter().filter(|&&p| p).count();
        if code == 0 || code == 4 {
            return Vec::new();
        }
        // bottom, right, top, left
        let edge = |e: usize| match e {
            0 => self.crossing(nodes[0], nodes[1], self.h_key(i, j)),
            1 => self.crossing(nodes[1], nodes[2], self.v_key(i + 1, j)),
            2 => self.crossing(nodes[3], nodes[2], self.h_key(i, j + 1)),
            _ => self.crossing(nodes[0], nodes[3], self.v_key(i, j)),
        };
        let cut: Vec<usize> = (0..4).filter(|&e| pos[e] != pos[(e + 1) % 4]).collect();
        if cut.len() == 2 {
            return vec![[edge(cut[0]), edge(cut[1])]];
        }
        // saddle: decided by the bilinear centre value
        let centre = 0.25 * nodes.iter().map(|&(a, b)| self.f(a, b)).sum::<f64>();
        if (centre > 0.0) == pos[0] {
            vec![[edge(0), edge(1)], [edge(2), edge(3)]]
        } else {
            vec![[edge(3), edge(0)], [edge(1), edge(2)]]
        }
    }
}

/// Traces `P_theta(x) + sign·P_theta'(y) = 0` on an `n x n` cell grid over `[-4, 4]^2`.
///
/// With `restricted`, the curve is clipped to `|P_theta(x)| <= 4`, the product of
/// the two spectra. Otherwise boundary pieces joined outside the box, and the
/// branches through the double point at the origin (both denominators even),
/// count as one component.
pub fn trace_curve(
    theta: Rational,
    theta_prime: Rational,
    sign: Sign,
    n: usize,
    restricted: bool,
) -> Result<ImplicitCurve> {
    if n < MIN_GRID {
        return Err(Error::IndexOutOfRange { index: n as i64, max: MIN_GRID as i64 });
    }
    let xs: Vec<f64> = (0..=n).map(|i| -4.0 + 8.0 * i as f64 / n as f64).collect();
    let px: Vec<f64> = xs.par_iter().map(|&x| charpoly_eval(theta, x)).collect();
    let py: Vec<f64> = xs.par_iter().map(|&y| charpoly_eval(theta_prime, y)).collect();
    if px.iter().chain(&py).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite polynomial value on grid".into()));
    }
    let grid = Grid { n, xs, px, py, s: sign.value() };

    let rows: Vec<Vec<([(u64, (f64, f64)); 2], (u32, u32))>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .flat_map(|i| grid.cell(i, j).into_iter().map(move |s| (s, (i as u32, j as u32))))
                .collect()
        })
        .collect();

    let mut segments = Vec::new();
    let mut ends = Vec::new();
    let mut cells = Vec::new();
    let spec = if restricted { Some(SpectrumCache::global().get(theta)?) } else { None };
    let mut fresh = 4 * ((n + 1) as u64).pow(2);
    for (pair, cell) in rows.into_iter().flatten() {
        let [(ka, a), (kb, b)] = pair;
        let seg = Segment { a, b };
        let mut key = [ka, kb];
        let seg = match &spec {
            None => seg,
            Some(spec) => {
                let inside = |x: f64| spec.contains(x);
                match (inside(a.0), inside(b.0)) {
                    (true, true) => seg,
                    (false, false) => continue,
                    (ina, _) => {
                        let (keep, lose) = if ina { (a, b) } else { (b, a) };
                        let edge = nearest_edge(spec.edges(), keep.0, lose.0);
                        let t = if lose.0 == keep.0 { 0.0 } else { (edge - keep.0) / (lose.0 - keep.0) };
                        let cut = (edge, keep.1 + t.clamp(0.0, 1.0) * (lose.1 - keep.1));
                        fresh += 1;
                        if ina {
                            key[1] = fresh;
                            Segment { a, b: cut }
                        } else {
                            key[0] = fresh;
                            Segment { a: cut, b }
                        }
                    }
                }
            }
        };
        segments.push(seg);
        ends.push(key);
        cells.push(cell);
    }

    let mut index = KeyIndex::default();
    let pairs: Vec<[usize; 2]> = ends.iter().map(|k| [index.id(k[0]), index.id(k[1])]).collect();
    let mut uf = UnionFind::new(index.ids.len());
    for &[a, b] in &pairs {
        uf.union(a, b);
    }
    if !restricted {
        stitch_outside(&grid, theta, theta_prime, &index, &mut uf);
        join_origin(&grid, theta, theta_prime, &pairs, &cells, &mut uf);
    }

    let mut label: HashMap<usize, usize> = HashMap::new();
    let component: Vec<usize> = pairs
        .iter()
        .map(|p| {
            let root = uf.find(p[0]);
            let next = label.len();
            *label.entry(root).or_insert(next)
        })
        .collect();
    Ok(ImplicitCurve {
        theta,
        theta_prime,
        sign,
        n,
        restricted,
        segments,
        component,
        component_count: label.len(),
        ends,
        cells,
    })
}

/// The band edge between `keep` (inside) and `lose` (outside).
fn nearest_edge(edges: &[f64], keep: f64, lose: f64) -> f64 {
    let (lo, hi) = if keep < lose { (keep, lose) } else { (lose, keep) };
    edges
        .iter()
        .copied()
        .filter(|&e| e >= lo - SPECTRUM_TOL && e <= hi + SPECTRUM_TOL)
        .min_by(|a, b| (a - keep).abs().total_cmp(&(b - keep).abs()))
        .unwrap_or(keep)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Joins boundary crossings whose connecting arc runs outside the box.
///
/// Beyond `x = 4`, `P_theta` increases to `+inf`, so for fixed `y` there is an
/// exterior zero iff `f(4, y) < 0`; between consecutive crossings that sign is
/// constant and the exterior arc joins them. The other sides differ only in the
/// sign at infinity. An interval running into a corner continues into the corner
/// quadrant, where the zero set is a single monotone arc; it joins the facing
/// interval of the adjacent side when both exist.
fn stitch_outside(
    grid: &Grid,
    theta: Rational,
    theta_prime: Rational,
    index: &KeyIndex,
    uf: &mut UnionFind,
) {
    let n = grid.n;
    let s = grid.s;
    let parity = |q: i64| if q % 2 == 0 { 1.0 } else { -1.0 };
    // sign of f far outside each side
    let far = |side: Side| match side {
        Side::Right => 1.0,
        Side::Left => parity(theta.denom()),
        Side::Top => s,
        Side::Bottom => s * parity(theta_prime.denom()),
    };
    let f_on = |side: Side, t: f64| match side {
        Side::Right => charpoly_eval(theta, 4.0) + s * charpoly_eval(theta_prime, t),
        Side::Left => charpoly_eval(theta, -4.0) + s * charpoly_eval(theta_prime, t),
        Side::Top => charpoly_eval(theta, t) + s * charpoly_eval(theta_prime, 4.0),
        Side::Bottom => charpoly_eval(theta, t) + s * charpoly_eval(theta_prime, -4.0),
    };
    let mut corner: HashMap<(Side, bool), usize> = HashMap::new();
    for side in [Side::Left, Side::Right, Side::Bottom, Side::Top] {
        // (position along the side, vertex id)
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for m in 0..n {
            let (key, pt) = match side {
                Side::Left | Side::Right => {
                    let i = if side == Side::Left { 0 } else { n };
                    if (grid.f(i, m) > 0.0) == (grid.f(i, m + 1) > 0.0) {
                        continue;
                    }
                    let (k, p) = grid.crossing((i, m), (i, m + 1), grid.v_key(i, m));
                    (k, p.1)
                }
                Side::Bottom | Side::Top => {
                    let j = if side == Side::Bottom { 0 } else { n };
                    if (grid.f(m, j) > 0.0) == (grid.f(m + 1, j) > 0.0) {
                        continue;
                    }
                    let (k, p) = grid.crossing((m, j), (m + 1, j), grid.h_key(m, j));
                    (k, p.0)
                }
            };
            if let Some(id) = index.get(key) {
                if hits.last().is_none_or(|h| h.1 != id) {
                    hits.push((pt, id));
                }
            }
        }
        if hits.is_empty() {
            continue;
        }
        let mut bounds = vec![-4.0];
        bounds.extend(hits.iter().map(|h| h.0));
        bounds.push(4.0);
        let outside = |a: f64, b: f64| {
            let v = f_on(side, 0.5 * (a + b));
            v != 0.0 && v.signum() != far(side)
        };
        for w in 0..=hits.len() {
            if !outside(bounds[w], bounds[w + 1]) {
                continue;
            }
            if w == 0 {
                corner.insert((side, false), hits[0].1);
            } else if w == hits.len() {
                corner.insert((side, true), hits[w - 1].1);
            } else {
                uf.union(hits[w - 1].1, hits[w].1);
            }
        }
    }
    // (side, at its high end) pairs meeting at each corner
    let corners = [
        ((Side::Right, false), (Side::Bottom, true)),
        ((Side::Right, true), (Side::Top, true)),
        ((Side::Left, false), (Side::Bottom, false)),
        ((Side::Left, true), (Side::Top, false)),
    ];
    for (c1, c2) in corners {
        if let (Some(&a), Some(&b)) = (corner.get(&c1), corner.get(&c2)) {
            uf.union(a, b);
        }
    }
}

/// For even denominators `P_theta(0)` and `P_theta'(0)` are `±4`; when they
/// cancel, the origin is a double point of the curve and its branches are joined.
fn join_origin(
    grid: &Grid,
    theta: Rational,
    theta_prime: Rational,
    pairs: &[[usize; 2]],
    cells: &[(u32, u32)],
    uf: &mut UnionFind,
) {
    if theta.denom() % 2 != 0 || theta_prime.denom() % 2 != 0 {
        return;
    }
    let f0 = charpoly_eval(theta, 0.0) + grid.s * charpoly_eval(theta_prime, 0.0);
    if f0.abs() > 1e-9 {
        return;
    }
    let n = grid.n;
    // cells whose closure contains the origin
    let lo = (n - 1) / 2;
    let hi = n / 2;
    let near = |c: u32| (lo..=hi).contains(&(c as usize));
    let mut first: Option<usize> = None;
    for (k, &(i, j)) in cells.iter().enumerate() {
        if !(near(i) && near(j)) {
            continue;
        }
        match first {
            None => first = Some(pairs[k][0]),
            Some(a) => uf.union(a, pairs[k][0]),
        }
    }
}

/// Classifies by reflecting segment midpoints: even4 if the curve is invariant
/// under both axis flips, odd if under the central flip, within two cell diagonals.
pub fn classify_symmetry(curve: &ImplicitCurve) -> Symmetry {
    let h = curve.cell();
    let tol = 2.0 * h * std::f64::consts::SQRT_2;
    let reach = 3i64;
    let mut by_cell: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (k, &c) in curve.cells.iter().enumerate() {
        by_cell.entry(c).or_default().push(k);
    }
    let n = curve.n as i64;
    let cell_of = |v: f64| (((v + 4.0) / h).floor() as i64).clamp(0, n - 1);
    let near = |p: (f64, f64)| {
        let (ci, cj) = (cell_of(p.0), cell_of(p.1));
        for dj in -reach..=reach {
            for di in -reach..=reach {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || i >= n || j >= n {
                    continue;
                }
                if let Some(list) = by_cell.get(&(i as u32, j as u32)) {
                    if list.iter().any(|&k| curve.segments[k].distance_to(p) < tol) {
                        return true;
                    }
                }
            }
        }
        false
    };
    let invariant = |map: &(dyn Fn((f64, f64)) -> (f64, f64) + Sync)| {
        !curve.segments.is_empty()
            && curve.segments.par_iter().all(|s| near(map(s.midpoint())))
    };
    if invariant(&|(x, y)| (-x, y)) && invariant(&|(x, y)| (x, -y)) {
        Symmetry::Even4
    } else if invariant(&|(x, y)| (-x, -y)) {
        Symmetry::Odd
    } else {
        Symmetry::Other
    }
}

/// Counts connected runs of the curve inside the band rectangles
/// `I_k x I'_(k+o)`, `o = (q' - q)/2`, each rectangle counted on its own.
pub fn diagonal_segments(curve: &ImplicitCurve) -> Result<usize> {
    let (q, q2) = (curve.theta.denom(), curve.theta_prime.denom());
    if (q2 - q) % 2 != 0 {
        return Ok(0);
    }
    let o = (q2 - q) / 2;
    let src = SpectrumCache::global().get(curve.theta)?;
    let dst = SpectrumCache::global().get(curve.theta_prime)?;
    let mut total = 0;
    for k in 1..=q {
        let k2 = k + o;
        if k2 < 1 || k2 > q2 {
            continue;
        }
        let (xl, xh) = src.band(k as usize)?;
        let (yl, yh) = dst.band(k2 as usize)?;
        let inside = |p: (f64, f64)| {
            p.0 >= xl - SPECTRUM_TOL
                && p.0 <= xh + SPECTRUM_TOL
                && p.1 >= yl - SPECTRUM_TOL
                && p.1 <= yh + SPECTRUM_TOL
        };
        let mut index = KeyIndex::default();
        let mut links = Vec::new();
        for (seg, key) in curve.segments.iter().zip(&curve.ends) {
            if inside(seg.midpoint()) {
                links.push([index.id(key[0]), index.id(key[1])]);
            }
        }
        let mut uf = UnionFind::new(index.ids.len());
        for &[a, b] in &links {
            uf.union(a, b);
        }
        let mut roots: Vec<usize> = links.iter().map(|l| uf.find(l[0])).collect();
        roots.sort_unstable();
        roots.dedup();
        total += roots.len();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn cubic_is_one_component() {
        let c = trace_curve(Rational::ONE, r(1, 3), Sign::Plus, 256, false).unwrap();
        assert_eq!(c.component_count, 1);
        // x = 6y - y^3 crosses the box three times
        let boxed = trace_curve(Rational::ONE, r(1, 3), Sign::Plus, 256, true).unwrap();
        assert_eq!(boxed.component_count, 3);
        assert_eq!(diagonal_segments(&boxed).unwrap(), 1);
    }

    #[test]
    fn passes_through_origin() {
        let c = trace_curve(Rational::ONE, r(1, 3), Sign::Plus, 128, false).unwrap();
        let d = c
            .segments
            .iter()
            .map(|s| s.distance_to((0.0, 0.0)))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-12);
    }

    #[test]
    fn vertices_near_zero_set() {
        let c = trace_curve(r(1, 3), r(1, 5), Sign::Plus, 128, false).unwrap();
        let h = c.cell();
        for s in &c.segments {
            for p in [s.a, s.b] {
                // one-cell slope bound from the polynomial values
                let grad = (charpoly_eval(c.theta, p.0 + h) - charpoly_eval(c.theta, p.0 - h)).abs()
                    + (charpoly_eval(c.theta_prime, p.1 + h) - charpoly_eval(c.theta_prime, p.1 - h))
                        .abs();
                assert!(c.residual(p.0, p.1).abs() <= 8.0 * grad + 1e-9);
            }
        }
    }

    #[test]
    fn small_grid_rejected() {
        assert!(trace_curve(Rational::ONE, r(1, 3), Sign::Plus, 32, false).is_err());
    }

    #[test]
    fn symmetry_by_parity() {
        let odd = trace_curve(r(1, 3), r(1, 5), Sign::Plus, 256, false).unwrap();
        assert_eq!(classify_symmetry(&odd), Symmetry::Odd);
        let even = trace_curve(r(1, 2), r(1, 4), Sign::Plus, 256, false).unwrap();
        assert_eq!(classify_symmetry(&even), Symmetry::Even4);
        let mixed = trace_curve(r(1, 2), r(1, 3), Sign::Plus, 256, false).unwrap();
        assert_eq!(classify_symmetry(&mixed), Symmetry::Other);
    }

    #[test]
    fn deterministic_under_parallelism() {
        let a = trace_curve(r(2, 5), r(2, 9), Sign::Plus, 128, false).unwrap();
        let b = trace_curve(r(2, 5), r(2, 9), Sign::Plus, 128, false).unwrap();
        assert_eq!(a.segments, b.segments);
        assert_eq!(a.component, b.component);
    }

    #[test]
    fn restricted_stays_in_spectrum() {
        let c = trace_curve(r(1, 3), r(1, 5), Sign::Plus, 256, true).unwrap();
        let spec = SpectrumCache::global().get(r(1, 3)).unwrap();
        for s in &c.segments {
            assert!(spec.contains(s.a.0) && spec.contains(s.b.0));
        }
        assert_eq!(diagonal_segments(&c).unwrap(), 3);
    }
}
