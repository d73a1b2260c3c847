//! Prefractal Koch snowflake polygons KSₙ with exact vertices.
//!
//! Vertices live on the level-n triangular lattice, so each polygon is kept
//! twice: as exact [`LatticePoint`]s and as integer grid coordinates scaled
//! by `3^n`. The grid copy drives fast exact predicates; a float copy feeds
//! the ray-casting prefilter.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{int, rat, rotate60, LatticePoint, LatticeVector, Rational, Rotation, SideOrientation};

/// Highest level built unless the caller raises the cap explicitly.
pub const DEFAULT_LEVEL_CAP: u32 = 8;

/// Hard ceiling: grid coordinates must fit an `i64` with headroom.
pub const MAX_LEVEL: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    /// 1-based side index ν in counterclockwise order.
    pub nu: usize,
    pub start: usize,
    pub end: usize,
    pub orientation: SideOrientation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub level: u32,
    pub nu: usize,
    /// Counterclockwise: the two base corners on KSₙ₋₁, then the outward apex.
    pub triangle: [LatticePoint; 3],
}

/// A point of KSₙ: a side (0-based index into [`Prefractal::sides`]) and
/// the arclength fraction measured from that side's first endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    pub side: usize,
    pub t: Rational,
}

impl BoundaryPoint {
    pub fn new(side: usize, t: Rational) -> Self {
        BoundaryPoint { side, t }
    }

    pub fn nu(&self) -> usize {
        self.side + 1
    }

    pub fn is_vertex(&self) -> bool {
        self.t.is_zero() || self.t.is_one()
    }

    pub fn to_json(&self) -> Value {
        json!({ "side": self.nu(), "t": rational_json(&self.t) })
    }
}

/// `[numerator, denominator]`, as JSON integers when they fit in `i64` and as
/// decimal strings otherwise.
pub fn rational_json(r: &Rational) -> Value {
    fn part(b: &BigInt) -> Value {
        match i64::try_from(b) {
            Ok(v) => json!(v),
            Err(_) => json!(b.to_string()),
        }
    }
    json!([part(r.numer()), part(r.denom())])
}

/// `[alpha_num, alpha_den, beta_num, beta_den]`.
pub fn point_json(v: &LatticePoint) -> Value {
    let a = rational_json(&v.alpha);
    let b = rational_json(&v.beta);
    json!([a[0], a[1], b[0], b[1]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointLocation {
    Inside,
    OnBoundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct Prefractal {
    level: u32,
    scale: i64,
    grid: Vec<(i64, i64)>,
    vertices: Vec<LatticePoint>,
    sides: Vec<Side>,
    float: Vec<(f64, f64)>,
}

/// Builds KSₙ with the default level cap.
pub fn build_prefractal(n: u32) -> Result<Prefractal> {
    build_prefractal_capped(n, DEFAULT_LEVEL_CAP)
}

pub fn build_prefractal_capped(n: u32, cap: u32) -> Result<Prefractal> {
    if n > cap || n > MAX_LEVEL {
        return Err(Error::Resource(format!("level {n} exceeds the cap of {}", cap.min(MAX_LEVEL))));
    }
    let mut grid: Vec<(i64, i64)> = vec![(0, 0), (1, 0), (0, 1)];
    for _ in 0..n {
        grid = refine_grid(&grid);
    }
    Ok(Prefractal::from_grid(n, grid))
}

/// One refinement step on grid coordinates, rescaling by 3 so the new
/// vertices stay integral.
fn refine_grid(grid: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let m = grid.len();
    let mut out = Vec::with_capacity(4 * m);
    for i in 0..m {
        let (pa, pb) = grid[i];
        let (qa, qb) = grid[(i + 1) % m];
        let a = (2 * pa + qa, 2 * pb + qb);
        let c = (pa + 2 * qa, pb + 2 * qb);
        // Outward apex: C - A = Q - P rotated clockwise by 60 degrees.
        let (da, db) = (qa - pa, qb - pb);
        let b = (a.0 + da + db, a.1 - da);
        out.extend([(3 * pa, 3 * pb), a, b, c]);
    }
    out
}

impl Prefractal {
    fn from_grid(level: u32, grid: Vec<(i64, i64)>) -> Self {
        let scale = 3i64.pow(level);
        let inv = rat(1, scale);
        let vertices: Vec<LatticePoint> =
            grid.iter().map(|&(a, b)| LatticeVector::new(int(a) * &inv, int(b) * &inv)).collect();
        let m = grid.len();
        let sides = (0..m)
            .map(|i| {
                let j = (i + 1) % m;
                let d = LatticeVector::from_ints(grid[j].0 - grid[i].0, grid[j].1 - grid[i].1);
                Side {
                    nu: i + 1,
                    start: i,
                    end: j,
                    orientation: SideOrientation::of_vector(&d).expect("prefractal sides follow lattice directions"),
                }
            })
            .collect();
        let s = scale as f64;
        let float = grid.iter().map(|&(a, b)| (a as f64 / s, b as f64 / s)).collect();
        Prefractal { level, scale, grid, vertices, sides, float }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `3^level`, the common denominator of every vertex coordinate.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &LatticePoint {
        &self.vertices[i]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> &Side {
        &self.sides[i]
    }

    pub fn num_sides(&self) -> usize {
        self.sides.len()
    }

    /// Vertex coordinates multiplied by `3^level`.
    pub fn grid(&self) -> &[(i64, i64)] {
        &self.grid
    }

    pub(crate) fn float_vertices(&self) -> &[(f64, f64)] {
        &self.float
    }

    pub fn side_vector(&self, i: usize) -> LatticeVector {
        let s = &self.sides[i];
        &self.vertices[s.end] - &self.vertices[s.start]
    }

    pub fn point_on_side(&self, i: usize, t: &Rational) -> LatticePoint {
        let s = &self.sides[i];
        &self.vertices[s.start] + &self.side_vector(i).scale(t)
    }

    pub fn position(&self, bp: &BoundaryPoint) -> LatticePoint {
        self.point_on_side(bp.side, &bp.t)
    }

    /// Vertex index if `bp` sits at a corner.
    pub fn vertex_of(&self, bp: &BoundaryPoint) -> Option<usize> {
        if bp.t.is_zero() {
            Some(self.sides[bp.side].start)
        } else if bp.t.is_one() {
            Some(self.sides[bp.side].end)
        } else {
            None
        }
    }

    pub fn perimeter(&self) -> Rational {
        rat(self.sides.len() as i64, self.scale)
    }

    /// Enclosed area in units of the KS₀ triangle (doubled lattice shoelace).
    pub fn area_ratio(&self) -> Rational {
        let m = self.grid.len();
        let twice: i128 = (0..m)
            .map(|i| {
                let (a, b) = self.grid[i];
                let (c, d) = self.grid[(i + 1) % m];
                a as i128 * d as i128 - b as i128 * c as i128
            })
            .sum();
        let s = self.scale as i128;
        Rational::new(BigInt::from(twice), BigInt::from(s * s))
    }

    /// Exact crossing-number test for an arbitrary rational point.
    pub fn locate_point(&self, x: &LatticePoint) -> PointLocation {
        let s = int(self.scale);
        let (px, py) = (&x.alpha * &s, &x.beta * &s);
        let m = self.grid.len();
        let mut inside = false;
        for i in 0..m {
            let (ax, ay) = (int(self.grid[i].0), int(self.grid[i].1));
            let j = (i + 1) % m;
            let (bx, by) = (int(self.grid[j].0), int(self.grid[j].1));
            let cr = (&bx - &ax) * (&py - &ay) - (&by - &ay) * (&px - &ax);
            if cr.is_zero()
                && px >= ax.clone().min(bx.clone())
                && px <= ax.clone().max(bx.clone())
                && py >= ay.clone().min(by.clone())
                && py <= ay.clone().max(by.clone())
            {
                return PointLocation::OnBoundary;
            }
            if (ay > py) != (by > py) {
                // Left of the upward edge (or right of the downward one).
                let upward = by > ay;
                if (cr.is_positive()) == upward {
                    inside = !inside;
                }
            }
        }
        if inside {
            PointLocation::Inside
        } else {
            PointLocation::Outside
        }
    }

    /// Integer version of [`Prefractal::locate_point`] for the point
    /// `(i, j) / 3^pow`, valid for `pow >= level`.
    pub fn locate_grid_point(&self, i: i64, j: i64, pow: u32) -> PointLocation {
        assert!(pow >= self.level, "query grid must be at least as fine as the polygon");
        let f = 3i128.pow(pow - self.level);
        let (px, py) = (i as i128, j as i128);
        let m = self.grid.len();
        let mut inside = false;
        for k in 0..m {
            let (ax, ay) = (self.grid[k].0 as i128 * f, self.grid[k].1 as i128 * f);
            let l = (k + 1) % m;
            let (bx, by) = (self.grid[l].0 as i128 * f, self.grid[l].1 as i128 * f);
            let cr = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
            if cr == 0 && px >= ax.min(bx) && px <= ax.max(bx) && py >= ay.min(by) && py <= ay.max(by) {
                return PointLocation::OnBoundary;
            }
            if (ay > py) != (by > py) && (cr > 0) == (by > ay) {
                inside = !inside;
            }
        }
        if inside {
            PointLocation::Inside
        } else {
            PointLocation::Outside
        }
    }

    /// `{level, vertices: [[alpha_num, alpha_den, beta_num, beta_den], ...]}`.
    pub fn to_json(&self) -> Value {
        let verts: Vec<Value> = self.vertices.iter().map(point_json).collect();
        json!({ "level": self.level, "vertices": verts })
    }
}

/// Finds `x` on the closed boundary. A vertex is reported on the side that
/// starts there (`t = 0`).
pub fn locate_on_boundary(p: &Prefractal, x: &LatticePoint) -> Result<BoundaryPoint> {
    let (fx, fy) = x.to_f64();
    let tol = 1e-9;
    let fl = p.float_vertices();
    let m = p.num_sides();
    let mut checked = vec![false; m];
    for (i, side) in p.sides().iter().enumerate() {
        let (ax, ay) = fl[side.start];
        let (bx, by) = fl[side.end];
        if fx < ax.min(bx) - tol || fx > ax.max(bx) + tol || fy < ay.min(by) - tol || fy > ay.max(by) + tol {
            continue;
        }
        checked[i] = true;
        if let Some(bp) = exact_on_side(p, i, x) {
            return Ok(bp);
        }
    }
    // The float box test can only miss when coordinates overflow f64.
    if !(fx.is_finite() && fy.is_finite()) {
        for i in (0..m).filter(|&i| !checked[i]) {
            if let Some(bp) = exact_on_side(p, i, x) {
                return Ok(bp);
            }
        }
    }
    Err(Error::NotOnBoundary { level: p.level() })
}

fn exact_on_side(p: &Prefractal, i: usize, x: &LatticePoint) -> Option<BoundaryPoint> {
    let start = p.vertex(p.side(i).start);
    let e = p.side_vector(i);
    let w = x - start;
    if !w.cross(&e).is_zero() {
        return None;
    }
    let t = if e.alpha.is_zero() { &w.beta / &e.beta } else { &w.alpha / &e.alpha };
    if t.is_negative() || t >= Rational::one() {
        return None;
    }
    Some(BoundaryPoint::new(i, t))
}

/// The `3·4^(n-1)` triangular cells added by the last refinement.
pub fn cells_of(p: &Prefractal) -> Result<Vec<Cell>> {
    if p.level() == 0 {
        return Err(Error::EmptyDomain);
    }
    let v = p.vertices();
    Ok((0..p.num_sides() / 4)
        .map(|k| Cell {
            level: p.level(),
            nu: k + 1,
            triangle: [v[4 * k + 3].clone(), v[4 * k + 1].clone(), v[4 * k + 2].clone()],
        })
        .collect())
}

/// Apex of the outward equilateral bump on a counterclockwise segment `pq`.
pub fn outward_apex(p: &LatticePoint, q: &LatticePoint) -> LatticePoint {
    let third = rat(1, 3);
    let d = q - p;
    let a = p + &d.scale(&third);
    &a + &rotate60(&d.scale(&third), Rotation::Cw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_perimeter() {
        let p0 = build_prefractal(0).unwrap();
        assert_eq!(p0.num_sides(), 3);
        assert_eq!(p0.perimeter(), int(3));
        let p2 = build_prefractal(2).unwrap();
        assert_eq!(p2.num_sides(), 48);
        assert_eq!(p2.perimeter(), rat(16, 3));
    }

    #[test]
    fn base_triangle_layout() {
        let p = build_prefractal(0).unwrap();
        assert_eq!(p.grid(), &[(0, 0), (1, 0), (0, 1)]);
        let o: Vec<_> = p.sides().iter().map(|s| s.orientation).collect();
        assert_eq!(o, vec![SideOrientation::Deg0, SideOrientation::Deg120, SideOrientation::Deg60]);
    }

    #[test]
    fn level_one_area() {
        assert_eq!(build_prefractal(1).unwrap().area_ratio(), rat(4, 3));
    }

    #[test]
    fn refinement_matches_rational_apex() {
        let p0 = build_prefractal(0).unwrap();
        let p1 = build_prefractal(1).unwrap();
        for k in 0..3 {
            let s = p0.side(k);
            let apex = outward_apex(p0.vertex(s.start), p0.vertex(s.end));
            assert_eq!(p1.vertex(4 * k + 2), &apex);
        }
    }

    #[test]
    fn level_cap() {
        assert!(matches!(build_prefractal(9), Err(Error::Resource(_))));
        assert!(build_prefractal_capped(9, 9).is_ok());
    }

    #[test]
    fn locate_fixtures() {
        let p = build_prefractal(0).unwrap();
        let mid = LatticeVector::new(rat(1, 2), int(0));
        assert_eq!(locate_on_boundary(&p, &mid).unwrap(), BoundaryPoint::new(0, rat(1, 2)));
        let v = LatticeVector::from_ints(1, 0);
        assert_eq!(locate_on_boundary(&p, &v).unwrap(), BoundaryPoint::new(1, int(0)));
        let x = LatticeVector::new(rat(7, 12), int(0));
        assert_eq!(locate_on_boundary(&p, &x).unwrap(), BoundaryPoint::new(0, rat(7, 12)));
        let inside = LatticeVector::new(rat(1, 3), rat(1, 3));
        assert!(matches!(locate_on_boundary(&p, &inside), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn vertex_tie_break_everywhere() {
        let p = build_prefractal(2).unwrap();
        for i in 0..p.num_sides() {
            let bp = locate_on_boundary(&p, p.vertex(p.side(i).start)).unwrap();
            assert_eq!(bp, BoundaryPoint::new(i, int(0)));
        }
    }

    #[test]
    fn cells() {
        assert_eq!(cells_of(&build_prefractal(0).unwrap()), Err(Error::EmptyDomain));
        assert_eq!(cells_of(&build_prefractal(1).unwrap()).unwrap().len(), 3);
        let p3 = build_prefractal(3).unwrap();
        let cells = cells_of(&p3).unwrap();
        assert_eq!(cells.len(), 48);
        for c in &cells {
            let [a, b, apex] = &c.triangle;
            for (u, v) in [(a, b), (b, apex), (apex, a)] {
                assert_eq!((u - v).norm2(), rat(1, 729));
            }
            // Counterclockwise triangle sitting outside KS_2.
            assert!((b - a).cross(&(apex - a)).is_positive());
        }
    }

    #[test]
    fn point_location() {
        let p = build_prefractal(1).unwrap();
        let c = LatticeVector::new(rat(1, 3), rat(1, 3));
        assert_eq!(p.locate_point(&c), PointLocation::Inside);
        // Apex region of the bottom bump.
        let below = LatticeVector::new(rat(5, 9), rat(-1, 9));
        assert_eq!(p.locate_point(&below), PointLocation::Inside);
        let far = LatticeVector::new(rat(5, 9), rat(-1, 2));
        assert_eq!(p.locate_point(&far), PointLocation::Outside);
        assert_eq!(p.locate_point(p.vertex(5)), PointLocation::OnBoundary);
        assert_eq!(p.locate_grid_point(5, -1, 2), PointLocation::Inside);
        assert_eq!(p.locate_grid_point(2, -1, 1), PointLocation::OnBoundary);
    }

    #[test]
    fn json_shape() {
        let v = build_prefractal(1).unwrap().to_json();
        assert_eq!(v["level"], 1);
        assert_eq!(v["vertices"].as_array().unwrap().len(), 12);
        assert_eq!(v["vertices"][1], json!([1, 3, 0, 1]));
    }
}
