//! Deterministic SVG rendering of the butterfly and of its images under similarities.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::curves::ImplicitCurve;
use crate::error::{Error, Result};
use crate::moebius::{farey, Rational};
use crate::similarity::Similarity;
use crate::spectrum::SpectrumCache;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub qmax: u32,
    pub margin: f64,
    /// Stroke width of the `q = 1` rows; row `q` gets `stroke / q`, floored at [`MIN_STROKE`].
    pub stroke: f64,
}

pub const MIN_STROKE: f64 = 0.5;

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig { width: 1024, height: 1024, qmax: 30, margin: 16.0, stroke: 4.0 }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qmax < 1 {
            return Err(Error::IndexOutOfRange { index: self.qmax as i64, max: 1 });
        }
        if self.width < 64 || self.height < 64 {
            return Err(Error::IndexOutOfRange {
                index: self.width.min(self.height) as i64,
                max: 64,
            });
        }
        let inner = 2.0 * self.margin;
        if !(self.margin >= 0.0 && inner < self.width as f64 && inner < self.height as f64) {
            return Err(Error::Numerical(format!("margin {} does not fit", self.margin)));
        }
        if !(self.stroke > 0.0 && self.stroke.is_finite()) {
            return Err(Error::Numerical(format!("stroke {} must be positive", self.stroke)));
        }
        Ok(())
    }

    pub fn stroke_for(&self, q: i64) -> f64 {
        (self.stroke / q as f64).max(MIN_STROKE)
    }

    /// World `(x, theta)` in `[-4, 4] x [0, 1]` to viewport pixels, `theta = 0` at the bottom.
    pub fn to_viewport(&self, x: f64, theta: f64) -> (f64, f64) {
        let w = self.width as f64 - 2.0 * self.margin;
        let h = self.height as f64 - 2.0 * self.margin;
        let px = self.margin + (x.clamp(-4.0, 4.0) + 4.0) / 8.0 * w;
        let py = self.height as f64 - self.margin - theta.clamp(0.0, 1.0) * h;
        (px, py)
    }
}

/// One horizontal slice of the picture: bands at a parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub theta: Rational,
    pub bands: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyImage {
    /// Ascending in `theta`.
    pub rows: Vec<Row>,
}

/// `v` with 12 significant digits in fixed notation; `-0` prints as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let prec = (11 - mag).max(0) as usize;
    let s = format!("{v:.prec$}");
    // rounding can produce an all-zero string such as "-0.000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        return "0".into();
    }
    s
}

/// Band rows for every Farey fraction up to `qmax`, computed in parallel.
pub fn butterfly_rows(qmax: u32) -> Result<ButterflyImage> {
    let cache = SpectrumCache::global();
    let rows = farey(qmax)
        .par_iter()
        .map(|&theta| {
            let spec = cache.get(theta)?;
            Ok(Row { theta, bands: spec.bands().collect() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ButterflyImage { rows })
}

/// Images of all bands of all Farey rows under `sim`, sorted by image parameter.
///
/// Each source band maps onto the image band with endpoints sent to endpoints,
/// so every source band contributes one image segment; the two halves of a
/// touching pair land in separate bands.
pub fn overlay_rows(sim: &Similarity, qmax: u32) -> Result<ButterflyImage> {
    let cache = SpectrumCache::global();
    let mut rows = farey(qmax)
        .par_iter()
        .map(|&theta| {
            let src = cache.get(theta)?;
            let mut bands = Vec::with_capacity(src.len());
            let mut target = None;
            for (k, (lo, hi)) in src.bands().enumerate() {
                let (a, k_out) = sim.map_in_band_with(cache, theta, k + 1, lo)?;
                let (b, _) = sim.map_in_band_with(cache, theta, k + 1, hi)?;
                debug_assert!(k_out >= 1);
                bands.push((a, b));
                target = Some(sim.target(theta)?.theta);
            }
            let theta = target.ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
            Ok(Row { theta, bands })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|a| a.theta);
    Ok(ButterflyImage { rows })
}

fn write_rows(out: &mut String, cfg: &RenderConfig, rows: &[Row], stroke: &str) {
    for row in rows {
        let w = fmt_num(cfg.stroke_for(row.theta.denom()));
        for &(lo, hi) in &row.bands {
            let (x1, y) = cfg.to_viewport(lo, row.theta.value());
            let (x2, _) = cfg.to_viewport(hi, row.theta.value());
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{w}"/>"#,
                fmt_num(x1),
                fmt_num(y),
                fmt_num(x2),
                fmt_num(y),
            );
        }
    }
}

fn header(cfg: &RenderConfig) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
        w = cfg.width,
        h = cfg.height
    )
}

/// The butterfly for `farey(qmax)`: one `<line>` per band, rows ascending in `theta`.
pub fn render_butterfly(cfg: &RenderConfig) -> Result<String> {
    cfg.validate()?;
    let img = butterfly_rows(cfg.qmax)?;
    let mut out = header(cfg);
    out.push_str("<g id=\"spectrum\" stroke-linecap=\"butt\">\n");
    write_rows(&mut out, cfg, &img.rows, "black");
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// The image of the butterfly under `sim`, drawn over the true spectra in gray.
pub fn render_similarity_overlay(sim: &Similarity, cfg: &RenderConfig) -> Result<String> {
    cfg.validate()?;
    let base = butterfly_rows(cfg.qmax)?;
    let img = overlay_rows(sim, cfg.qmax)?;
    let mut out = header(cfg);
    out.push_str("<g id=\"spectrum\" stroke-linecap=\"butt\">\n");
    write_rows(&mut out, cfg, &base.rows, "#bbbbbb");
    out.push_str("</g>\n<g id=\"image\" stroke-linecap=\"butt\">\n");
    write_rows(&mut out, cfg, &img.rows, "#c0392b");
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// A traced curve on `[-4, 4]^2` in a `size x size` viewport, one path per component.
pub fn render_curve(curve: &ImplicitCurve, size: u32) -> Result<String> {
    if size < 64 {
        return Err(Error::IndexOutOfRange { index: size as i64, max: 64 });
    }
    let s = size as f64;
    let to_px = |(x, y): (f64, f64)| ((x + 4.0) / 8.0 * s, s - (y + 4.0) / 8.0 * s);
    let mut out = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    );
    for (c, members) in curve.components().iter().enumerate() {
        let mut d = String::new();
        for &k in members {
            let seg = curve.segments[k];
            let (a, b) = (to_px(seg.a), to_px(seg.b));
            let _ = write!(d, "M{} {}L{} {}", fmt_num(a.0), fmt_num(a.1), fmt_num(b.0), fmt_num(b.1));
        }
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1"/>"#,
            PALETTE[c % PALETTE.len()]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
