//! Plain SVG output for prefractals, orbits and paths.

use std::fmt::Write;

use crate::billiard::{orbit_polyline, Orbit};
use crate::compat::{CompatibleSequence, Tower};
use crate::exact::to_cartesian;
use crate::paths::PolygonalPath;
use crate::prefractal::Prefractal;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#c0392b", "#2471a3", "#229954", "#b9770e", "#7d3c98", "#17a589"];

/// Accumulates shapes in Cartesian coordinates and maps them to a square
/// canvas with the y axis pointing up.
pub struct Canvas {
    min: (f64, f64),
    scale: f64,
    body: String,
}

impl Canvas {
    /// Canvas fitting the given points.
    pub fn fit<'a>(points: impl IntoIterator<Item = &'a (f64, f64)>) -> Canvas {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        if !lo.0.is_finite() {
            lo = (0.0, 0.0);
            hi = (1.0, 1.0);
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
        Canvas { min: (lo.0, hi.1), scale: (SIZE - 2.0 * MARGIN) / span, body: String::new() }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (MARGIN + (x - self.min.0) * self.scale, MARGIN + (self.min.1 - y) * self.scale)
    }

    fn points_attr(&self, pts: &[(f64, f64)]) -> String {
        let mut s = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], stroke: &str, fill: &str) {
        let attr = self.points_attr(pts);
        let _ = writeln!(self.body, r#"<polygon points="{attr}" fill="{fill}" stroke="{stroke}" stroke-width="1"/>"#);
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let attr = self.points_attr(pts);
        let _ =
            writeln!(self.body, r#"<polyline points="{attr}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#);
    }

    pub fn dot(&mut self, p: (f64, f64), r: f64, fill: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn outline(p: &Prefractal) -> Vec<(f64, f64)> {
    p.vertices().iter().map(to_cartesian).collect()
}

pub fn render_prefractal(p: &Prefractal) -> String {
    let pts = outline(p);
    let mut c = Canvas::fit(&pts);
    c.polygon(&pts, "black", "#f4f6f7");
    c.finish()
}

pub fn render_orbit(p: &Prefractal, o: &Orbit) -> String {
    let pts = outline(p);
    let mut c = Canvas::fit(&pts);
    c.polygon(&pts, "black", "#f4f6f7");
    let line = orbit_polyline(p, o);
    c.polyline(&line, PALETTE[0], 1.0);
    for &q in &line {
        c.dot(q, 2.0, PALETTE[0]);
    }
    c.finish()
}

/// Every member orbit over the deepest outline, one colour per level.
pub fn render_sequence(tower: &Tower, seq: &CompatibleSequence) -> String {
    let deepest = tower.get(seq.range.1);
    let pts = outline(deepest);
    let mut c = Canvas::fit(&pts);
    c.polygon(&pts, "black", "#f4f6f7");
    for (i, m) in seq.members.iter().enumerate() {
        if let Some(o) = &m.orbit {
            c.polyline(&orbit_polyline(tower.get(m.level), o), PALETTE[i % PALETTE.len()], 0.8);
        }
    }
    c.finish()
}

/// Path vertices and limit estimate over the deepest outline.
pub fn render_path(tower: &Tower, path: &PolygonalPath) -> String {
    let pts = outline(tower.get(path.depth));
    let mut c = Canvas::fit(&pts);
    c.polygon(&pts, "black", "#f4f6f7");
    let line: Vec<(f64, f64)> = path.vertices.iter().map(|v| to_cartesian(&v.point)).collect();
    c.polyline(&line, PALETTE[1], 1.2);
    for &q in &line {
        c.dot(q, 2.5, PALETTE[1]);
    }
    c.dot(path.limit.cartesian(), 3.5, PALETTE[0]);
    c.finish()
}
