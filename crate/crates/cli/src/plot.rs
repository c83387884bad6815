//! Static SVG of the bent maps `f_1`, `f_2`.
//!
//! Each polyline carries the exact map in `data-map` (the same text as the
//! `f1`/`f2` certificate stages) so plotted values can be re-checked.

use std::fmt::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use ordspace::realization::{BentMaps, PLHomeo};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.lo) / (self.hi - self.lo) * (SIZE - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - (v - self.lo) / (self.hi - self.lo) * (SIZE - 2.0 * MARGIN)
    }
}

fn f(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(0.0)
}

fn polyline(out: &mut String, frame: &Frame, name: &str, map: &PLHomeo, color: &str) {
    let mut xs: Vec<f64> = vec![frame.lo];
    xs.extend(map.breakpoints().iter().map(|(x, _)| f(x)).filter(|x| *x > frame.lo && *x < frame.hi));
    xs.push(frame.hi);
    let mut pts = String::new();
    for x in xs {
        let y = f(&map.eval(&BigRational::from_float(x).unwrap_or_default()));
        let _ = write!(pts, "{:.2},{:.2} ", frame.x(x), frame.y(y.clamp(frame.lo - 1.0, frame.hi + 1.0)));
    }
    let _ = writeln!(
        out,
        r#"  <polyline id="{name}" data-map="{map}" points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>"#,
        name = name,
        map = map,
        pts = pts.trim_end(),
        color = color
    );
}

fn marker(out: &mut String, frame: &Frame, x: &BigRational, y: &BigRational, label: &str) {
    let (px, py) = (frame.x(f(x)), frame.y(f(y)));
    let _ = writeln!(
        out,
        r#"  <circle cx="{:.2}" cy="{:.2}" r="4" data-x="{}" data-y="{}"/><text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
        px,
        py,
        x,
        y,
        px + 6.0,
        py - 6.0,
        label
    );
}

pub fn render(bent: &BentMaps) -> String {
    let f1_bp = bent.f1.eval(&bent.bp);
    let span = f(&f1_bp) - f(&bent.p);
    let frame = Frame { lo: f(&bent.p) - span, hi: f(&f1_bp) + 1.0 };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SIZE
    );
    let _ = writeln!(
        out,
        r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
        frame.x(frame.lo),
        frame.y(frame.lo),
        frame.x(frame.hi),
        frame.y(frame.hi)
    );
    let _ = writeln!(
        out,
        r#"  <line x1="{:.2}" y1="{m}" x2="{:.2}" y2="{b}" stroke="gray"/>"#,
        frame.x(f(&bent.p)),
        frame.x(f(&bent.p)),
        m = MARGIN,
        b = SIZE - MARGIN
    );
    polyline(&mut out, &frame, "f1", &bent.f1, "steelblue");
    polyline(&mut out, &frame, "f2", &bent.f2, "firebrick");
    marker(&mut out, &frame, &bent.p, &bent.ap, "(g+(0), ag+(0))");
    marker(&mut out, &frame, &bent.ap, &bent.bp, "(ag+(0), bg+(0))");
    marker(&mut out, &frame, &bent.bp, &f1_bp, "(bg+(0), f1(bg+(0)))");
    out.push_str("</svg>\n");
    out
}

/// The `data-map` text of the polyline with the given id.
pub fn map_attribute<'a>(svg: &'a str, id: &str) -> Option<&'a str> {
    let tag = format!(r#"id="{}" data-map=""#, id);
    let start = svg.find(&tag)? + tag.len();
    let len = svg[start..].find('"')?;
    Some(&svg[start..start + len])
}
