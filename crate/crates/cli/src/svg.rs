//! Self-contained SVG plots with inline styling.

use std::fmt::Write;

use moebius_core::contraction::{CellOutcome, RegionScan};
use moebius_core::Complex64;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 56.0;

/// Maps a data rectangle onto the square plot area, y up.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * MARGIN)
    }

    fn point(&self, z: Complex64) -> String {
        format!("{:.2},{:.2}", self.px(z.re), self.py(z.im))
    }

    /// Square frame around the given points with 8% padding.
    fn fit(points: impl Iterator<Item = Complex64>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in points {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let half = 0.54 * (x1 - x0).max(y1 - y0).max(1e-9);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        Self {
            x0: cx - half,
            x1: cx + half,
            y0: cy - half,
            y1: cy + half,
        }
    }
}

fn header(out: &mut String, title: &str, f: &Frame) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, SIZE / 2.0, escape(title));
    let (l, r, b, t) = (f.px(f.x0), f.px(f.x1), f.py(f.y0), f.py(f.y1));
    let _ = writeln!(
        out,
        r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        r - l,
        b - t
    );
    if f.x0 < 0.0 && f.x1 > 0.0 {
        let _ = writeln!(out, r##"<line x1="{0:.2}" y1="{t:.2}" x2="{0:.2}" y2="{b:.2}" stroke="#bbb" stroke-dasharray="3,3"/>"##, f.px(0.0));
    }
    if f.y0 < 0.0 && f.y1 > 0.0 {
        let _ = writeln!(out, r##"<line x1="{l:.2}" y1="{0:.2}" x2="{r:.2}" y2="{0:.2}" stroke="#bbb" stroke-dasharray="3,3"/>"##, f.py(0.0));
    }
    let label = |v: f64| format!("{v:.3}");
    let _ = writeln!(out, r#"<text x="{l:.2}" y="{:.2}" text-anchor="start">{}</text>"#, b + 16.0, label(f.x0));
    let _ = writeln!(out, r#"<text x="{r:.2}" y="{:.2}" text-anchor="end">{}</text>"#, b + 16.0, label(f.x1));
    let _ = writeln!(out, r#"<text x="{:.2}" y="{b:.2}" text-anchor="end">{}</text>"#, l - 4.0, label(f.y0));
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, l - 4.0, t + 10.0, label(f.y1));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Blue below 1, white at 1, red above; each side scaled to its extreme.
fn norm_color(norm: f64, lo: f64, hi: f64) -> String {
    let (r, g, b) = if norm >= 1.0 {
        let s = if hi > 1.0 { ((norm - 1.0) / (hi - 1.0)).clamp(0.0, 1.0).sqrt() } else { 0.0 };
        (255.0, 255.0 * (1.0 - s), 255.0 * (1.0 - s))
    } else {
        let s = if lo < 1.0 { ((1.0 - norm) / (1.0 - lo)).clamp(0.0, 1.0).sqrt() } else { 0.0 };
        (255.0 * (1.0 - s), 255.0 * (1.0 - s), 255.0)
    };
    format!("rgb({:.0},{:.0},{:.0})", r, g, b)
}

/// Heat map of the direct norm per cell; singular cells are grey. The
/// optional segment is drawn on top, its open end marked by a hollow dot.
pub fn region_heatmap(scan: &RegionScan, title: &str, segment: Option<(Complex64, Complex64)>) -> String {
    let w = scan.window;
    let (nx, ny) = scan.resolution;
    let (dx, dy) = ((w.x1 - w.x0) / (nx - 1) as f64, (w.y1 - w.y0) / (ny - 1) as f64);
    let f = Frame {
        x0: w.x0 - 0.5 * dx,
        x1: w.x1 + 0.5 * dx,
        y0: w.y0 - 0.5 * dy,
        y1: w.y1 + 0.5 * dy,
    };
    let norms = scan.cells.iter().filter_map(|c| match c.outcome {
        CellOutcome::Norm { direct_norm, .. } => Some(direct_norm),
        CellOutcome::SingularPencil { .. } => None,
    });
    let (lo, hi) = norms.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), n| (a.min(n), b.max(n)));

    let mut out = String::new();
    header(&mut out, title, &f);
    let (cw, ch) = (f.px(f.x0 + dx) - f.px(f.x0), f.py(f.y0) - f.py(f.y0 + dy));
    for cell in &scan.cells {
        let fill = match cell.outcome {
            CellOutcome::Norm { direct_norm, .. } => norm_color(direct_norm, lo, hi),
            CellOutcome::SingularPencil { .. } => "rgb(160,160,160)".to_string(),
        };
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            f.px(cell.lambda.re - 0.5 * dx),
            f.py(cell.lambda.im + 0.5 * dy),
            cw + 0.3,
            ch + 0.3
        );
    }
    if let Some((a, b)) = segment {
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"##,
            f.px(a.re),
            f.py(a.im),
            f.px(b.re),
            f.py(b.im)
        );
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, f.px(a.re), f.py(a.im));
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="white" stroke="black" stroke-width="1.5"/>"#,
            f.px(b.re),
            f.py(b.im)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">norm range [{lo:.4}, {hi:.4}]: blue below 1, white at 1, red above</text>"#,
        SIZE / 2.0,
        SIZE - 12.0
    );
    out.push_str("</svg>\n");
    out
}

pub struct Curve<'a> {
    pub points: &'a [Complex64],
    pub color: &'a str,
    pub label: &'a str,
    pub closed: bool,
    pub dashed: bool,
}

/// Overlaid polylines, each with a legend entry, plus optional marked points.
pub fn curves(title: &str, curves: &[Curve], marks: &[Complex64]) -> String {
    let f = Frame::fit(curves.iter().flat_map(|c| c.points.iter().copied()).chain(marks.iter().copied()));
    let mut out = String::new();
    header(&mut out, title, &f);
    for (k, c) in curves.iter().enumerate() {
        if c.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = c.points.iter().map(|&z| f.point(z)).collect();
        let tag = if c.closed { "polygon" } else { "polyline" };
        let dash = if c.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<{tag} points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            pts.join(" "),
            c.color
        );
        let y = 44.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="{3}" stroke-width="2"{dash}/><text x="{4:.2}" y="{5:.2}">{6}</text>"#,
            MARGIN + 8.0,
            y,
            MARGIN + 32.0,
            c.color,
            MARGIN + 38.0,
            y + 4.0,
            escape(c.label)
        );
    }
    for &z in marks {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="black"/>"#, f.px(z.re), f.py(z.im));
    }
    out.push_str("</svg>\n");
    out
}
