//! Plain SVG figures and CSV data for the SRG clouds and the determinant locus.
//! Output is deterministic: no timestamps, fixed number formatting.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::nyquist::DetLocus;
use crate::ratfun::{FrequencyGrid, LtiModel};
use crate::srg::{SamplerConfig, SrgCloud, SrgSampler};

type C = Complex64;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 56.0;

/// Colors cycled over series.
pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One named set of points, drawn as dots or as a polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<C>,
    pub line: bool,
}

/// Axis-aligned view box in data coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Bounds {
    /// Smallest box holding every finite point and the origin, padded by 5% and made square.
    pub fn fit<'a>(points: impl IntoIterator<Item = &'a C>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for z in points.into_iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12) * 1.1;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        Self {
            x: (cx - 0.5 * span, cx + 0.5 * span),
            y: (cy - 0.5 * span, cy + 0.5 * span),
        }
    }

    fn to_px(self, z: C) -> (f64, f64) {
        let u = MARGIN + (z.re - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let v = HEIGHT - MARGIN - (z.im - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (u, v)
    }
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Complex-plane figure with axes, ticks, an origin marker and a legend.
pub fn complex_plane_svg(title: &str, series: &[Series], bounds: Bounds) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));

    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#888"/>"##, right - left, bottom - top);
    let step = tick_step(bounds.x.1 - bounds.x.0);
    let mut t = (bounds.x.0 / step).ceil() * step;
    while t <= bounds.x.1 {
        let (u, _) = bounds.to_px(C::new(t, bounds.y.0));
        let _ = writeln!(s, r##"<line x1="{u:.2}" y1="{top}" x2="{u:.2}" y2="{bottom}" stroke="#eee"/>"##);
        let _ = writeln!(s, r#"<text x="{u:.2}" y="{}" text-anchor="middle">{}</text>"#, bottom + 14.0, fmt_tick(t));
        t += step;
    }
    let step = tick_step(bounds.y.1 - bounds.y.0);
    let mut t = (bounds.y.0 / step).ceil() * step;
    while t <= bounds.y.1 {
        let (_, v) = bounds.to_px(C::new(bounds.x.0, t));
        let _ = writeln!(s, r##"<line x1="{left}" y1="{v:.2}" x2="{right}" y2="{v:.2}" stroke="#eee"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 4.0, v + 4.0, fmt_tick(t));
        t += step;
    }
    let (u0, v0) = bounds.to_px(C::new(0.0, 0.0));
    let _ = writeln!(s, r##"<line x1="{left}" y1="{v0:.2}" x2="{right}" y2="{v0:.2}" stroke="#444"/>"##);
    let _ = writeln!(s, r##"<line x1="{u0:.2}" y1="{top}" x2="{u0:.2}" y2="{bottom}" stroke="#444"/>"##);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Re</text>"#, WIDTH / 2.0, HEIGHT - 16.0);
    let _ = writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">Im</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);

    let _ = writeln!(s, r#"<g>"#);
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let finite = ser.points.iter().filter(|z| z.re.is_finite() && z.im.is_finite());
        if ser.line {
            let mut d = String::new();
            for (i, z) in finite.enumerate() {
                let (u, v) = bounds.to_px(*z);
                let _ = write!(d, "{}{u:.2},{v:.2}", if i == 0 { "M" } else { " L" });
            }
            let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>"#);
        } else {
            let _ = writeln!(s, r#"<g fill="{color}" fill-opacity="0.35">"#);
            for z in finite {
                let (u, v) = bounds.to_px(*z);
                let _ = writeln!(s, r#"<circle cx="{u:.2}" cy="{v:.2}" r="1.3"/>"#);
            }
            let _ = writeln!(s, "</g>");
        }
    }
    let _ = writeln!(s, "</g>");

    // origin marker
    let _ = writeln!(
        s,
        r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="black" stroke-width="2"/>"#,
        u0 - 5.0,
        v0 - 5.0,
        u0 + 5.0,
        v0 + 5.0,
        u0 - 5.0,
        v0 + 5.0,
        u0 + 5.0,
        v0 - 5.0
    );
    for (k, ser) in series.iter().enumerate() {
        let y = top + 16.0 + 16.0 * k as f64;
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, right - 150.0, y - 9.0);
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, right - 134.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Determinant locus over negative and positive frequencies with the origin marked.
pub fn nyquist_svg(locus: &DetLocus, title: &str) -> String {
    let contour = locus.contour();
    let series = [Series {
        label: format!("det(I + {} H1 H2)", locus.tau),
        points: contour.clone(),
        line: true,
    }];
    complex_plane_svg(title, &series, Bounds::fit(&contour))
}

/// SRG clouds of a model over a grid.
pub fn sample_clouds<M: LtiModel>(model: &M, grid: &FrequencyGrid, cfg: &SamplerConfig) -> Result<Vec<SrgCloud>> {
    let sampler = SrgSampler::new(model.dim(), cfg.clone());
    grid.omegas()
        .par_iter()
        .map(|&w| sampler.cloud(&model.response(w)?, w))
        .collect()
}

/// Projection onto the complex plane of every cloud with `omega` in `band`.
pub fn srg_projection_svg(systems: &[(&str, &[SrgCloud])], band: (f64, f64), title: &str) -> String {
    let series: Vec<Series> = systems
        .iter()
        .map(|(label, clouds)| Series {
            label: (*label).to_string(),
            points: clouds
                .iter()
                .filter(|c| c.omega >= band.0 && c.omega <= band.1)
                .flat_map(|c| c.points.iter().copied())
                .collect(),
            line: false,
        })
        .collect();
    let bounds = Bounds::fit(series.iter().flat_map(|s| s.points.iter()));
    complex_plane_svg(title, &series, bounds)
}

/// CSV `omega,re,im`, one row per SRG point.
pub fn write_srg_triples<W: Write>(w: &mut W, clouds: &[SrgCloud]) -> std::io::Result<()> {
    writeln!(w, "omega,re,im")?;
    for c in clouds {
        for z in &c.points {
            writeln!(w, "{},{},{}", c.omega, z.re, z.im)?;
        }
    }
    Ok(())
}
