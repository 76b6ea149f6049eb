//! Deterministic SVG drawings of the pillowcase fundamental domain.
//!
//! Output depends only on the inputs: curves are drawn in label order,
//! marks in `(α, β)` order, and every coordinate is printed with two
//! decimals.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use crate::charvar::ABELIAN_LABEL;
use crate::pillowcase::{abelian_locus, PillowCurve, PillowPoint};

const SCALE: f64 = 100.0;
const MARGIN: f64 = 40.0;
/// Consecutive vertices further apart than this straddle a fold or the
/// `β` seam and are not joined.
const BREAK: f64 = 0.5;
const PALETTE: [&str; 6] = ["#1f4e9c", "#2a8c3a", "#8c4a9c", "#c77a12", "#127c8c", "#555555"];

/// A labeled point, drawn as a small cross.
#[derive(Debug, Clone, PartialEq)]
pub struct Mark {
    pub point: PillowPoint,
    pub label: String,
}

fn x(alpha: f64) -> f64 {
    MARGIN + alpha * SCALE
}

fn y(beta: f64) -> f64 {
    MARGIN + (TAU - beta) * SCALE
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Splits a curve into runs that can be drawn as single polylines.
fn runs(c: &PillowCurve) -> Vec<Vec<PillowPoint>> {
    let mut out: Vec<Vec<PillowPoint>> = Vec::new();
    let mut cur: Vec<PillowPoint> = Vec::new();
    for &p in &c.points {
        if let Some(q) = cur.last() {
            let d = ((p.alpha - q.alpha).powi(2) + (p.beta - q.beta).powi(2)).sqrt();
            if d > BREAK {
                out.push(std::mem::take(&mut cur));
            }
        }
        cur.push(p);
    }
    out.push(cur);
    out.retain(|r| r.len() >= 2);
    out
}

fn polyline(svg: &mut String, pts: &[PillowPoint], stroke: &str, width: f64) {
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", num(x(p.alpha)), num(y(p.beta)))).collect();
    let _ = writeln!(
        svg,
        r#"  <polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
        coords.join(" "),
        num(width)
    );
}

/// Draws the domain `[0, π] × [0, 2π]`, its corners, the abelian locus in
/// red, the given curves and the marks.
pub fn emit_svg(curves: &[PillowCurve], marks: &[Mark]) -> String {
    let w = 2.0 * MARGIN + PI * SCALE;
    let h = 2.0 * MARGIN + TAU * SCALE;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}" width="{}" height="{}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
    let _ = writeln!(
        svg,
        r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#ffffff" stroke="#000000" stroke-width="1.00"/>"##,
        num(x(0.0)),
        num(y(TAU)),
        num(PI * SCALE),
        num(TAU * SCALE)
    );
    // the half-lines β = π glue to themselves under the involution
    let _ = writeln!(
        svg,
        r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-dasharray="4 4" stroke-width="0.50"/>"##,
        num(x(0.0)),
        num(y(PI)),
        num(x(PI)),
        num(y(PI))
    );
    for (alpha, beta, name) in [(0.0, 0.0, "(0,0)"), (0.0, PI, "P"), (PI, 0.0, "(π,0)"), (PI, PI, "Q"), (0.0, TAU, "(0,0)"), (PI, TAU, "(π,0)")] {
        let _ = writeln!(
            svg,
            r##"  <circle cx="{}" cy="{}" r="3.00" fill="#000000"/><text x="{}" y="{}" font-size="10" font-family="monospace">{}</text>"##,
            num(x(alpha)),
            num(y(beta)),
            num(x(alpha) + if alpha == 0.0 { -34.0 } else { 6.0 }),
            num(y(beta) - 4.0),
            escape(name)
        );
    }
    for r in runs(&abelian_locus()) {
        polyline(&mut svg, &r, "#d62728", 2.0);
    }
    let mut sorted: Vec<&PillowCurve> = curves.iter().filter(|c| c.label != ABELIAN_LABEL).collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label));
    for (i, c) in sorted.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(svg, r#"  <g id="{}">"#, escape(&c.label));
        for r in runs(c) {
            polyline(&mut svg, &r, color, 1.5);
        }
        let _ = writeln!(svg, "  </g>");
    }
    let mut ms: Vec<&Mark> = marks.iter().collect();
    ms.sort_by(|a, b| a.point.alpha.total_cmp(&b.point.alpha).then(a.point.beta.total_cmp(&b.point.beta)));
    for m in ms {
        let (cx, cy) = (x(m.point.alpha), y(m.point.beta));
        let _ = writeln!(
            svg,
            r##"  <path d="M{} {} L{} {} M{} {} L{} {}" stroke="#000000" stroke-width="1.50"><title>{}</title></path>"##,
            num(cx - 4.0),
            num(cy - 4.0),
            num(cx + 4.0),
            num(cy + 4.0),
            num(cx - 4.0),
            num(cy + 4.0),
            num(cx + 4.0),
            num(cy - 4.0),
            escape(&m.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
