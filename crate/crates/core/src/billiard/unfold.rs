//! Unfolding a periodic orbit into a straight segment, and folding a
//! straight segment back into the table.
//!
//! Folding walks the segment across the scale-n triangular grid lines and
//! reflects whenever the table image of a crossing lands on a boundary edge.
//! It never calls the ray caster, so it serves as an independent check on
//! [`run_orbit`](super::run_orbit).

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};

use super::{BilliardState, Direction, InitialCondition, Orbit, OrbitStatus};
use crate::error::{Error, Result};
use crate::exact::{int, LatticeDir, LatticePoint, LatticeVector, Rational, SideOrientation};
use crate::prefractal::{locate_on_boundary, BoundaryPoint, Prefractal};

/// `x ↦ m·x + t` on lattice coordinates, `m` an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub m: [[i64; 2]; 2],
    pub t: LatticeVector,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap { m: [[1, 0], [0, 1]], t: LatticeVector::zero() }
    }

    /// Reflection in the line of orientation `o` through `q`.
    pub fn reflection(o: SideOrientation, q: &LatticePoint) -> Self {
        let m = o.reflection_matrix();
        let rq = apply_linear(&m, q);
        AffineMap { m, t: q - &rq }
    }

    pub fn apply(&self, x: &LatticePoint) -> LatticePoint {
        &apply_linear(&self.m, x) + &self.t
    }

    pub fn apply_dir(&self, d: LatticeDir) -> LatticeDir {
        LatticeDir { a: self.m[0][0] * d.a + self.m[0][1] * d.b, b: self.m[1][0] * d.a + self.m[1][1] * d.b }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &AffineMap) -> AffineMap {
        let a = &self.m;
        let b = &first.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        AffineMap { m, t: &apply_linear(a, &first.t) + &self.t }
    }
}

fn apply_linear(m: &[[i64; 2]; 2], x: &LatticeVector) -> LatticeVector {
    LatticeVector::new(
        &x.alpha * int(m[0][0]) + &x.beta * int(m[0][1]),
        &x.alpha * int(m[1][0]) + &x.beta * int(m[1][1]),
    )
}

/// A periodic orbit laid out as one straight segment across reflected
/// copies of the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unfolding {
    pub level: u32,
    pub start: LatticePoint,
    pub end: LatticePoint,
    pub dir: LatticeDir,
    pub copies: usize,
    /// Plane-to-table map on the copy entered after the last bounce.
    pub final_map: AffineMap,
}

pub fn unfold_orbit(p: &Prefractal, o: &Orbit) -> Result<Unfolding> {
    let period = o.period().ok_or_else(|| Error::Domain("only periodic orbits can be unfolded".into()))?;
    let d0 = o.footprint[0].dir;
    let start = p.position(&o.footprint[0].point);
    let mut x = start.clone();
    let mut map = AffineMap::identity();
    for i in 0..period {
        let cur = &o.footprint[i];
        let next = &o.footprint[(i + 1) % period];
        let a = p.position(&cur.point);
        let b = p.position(&next.point);
        let step = &b - &a;
        let lambda = if cur.dir.a != 0 { &step.alpha / int(cur.dir.a) } else { &step.beta / int(cur.dir.b) };
        if step != cur.dir.to_vector().scale(&lambda) || !lambda.is_positive() {
            return Err(Error::Verification(format!("footprint step {i} is not along its direction")));
        }
        x = &x + &d0.to_vector().scale(&lambda);
        let o_side = p.side(next.point.side).orientation;
        map = AffineMap::reflection(o_side, &b).after(&map);
        if map.apply(&x) != b {
            return Err(Error::Verification(format!("unfolded copy {i} does not land on the footprint")));
        }
    }
    if map.apply_dir(d0) != d0 {
        return Err(Error::Verification("unfolded segment changes direction".into()));
    }
    Ok(Unfolding { level: p.level(), start, end: x, dir: d0, copies: period, final_map: map })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Family {
    Alpha,
    Beta,
    Sum,
}

fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("grid coordinate fits i64")
}

/// Walks the straight segment `start -> end` through Ω(KSₙ), reflecting at
/// boundary edges, and returns the folded orbit. A full period closes as
/// `Periodic`; anything shorter comes back `Truncated`.
/// Side endpoints on the level grid.
type GridEdge = ((i64, i64), (i64, i64));

pub fn fold_segment(p: &Prefractal, start: &LatticePoint, end: &LatticePoint) -> Result<Orbit> {
    let d = LatticeDir::from_vector(&(end - start)).ok_or_else(|| Error::Domain("segment has zero length".into()))?;
    let bp0 = locate_on_boundary(p, start)?;
    let init = InitialCondition::new(p, bp0.clone(), Direction::Exact(d))?;

    let edges: HashMap<GridEdge, usize> = p
        .sides()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (a, b) = (p.grid()[s.start], p.grid()[s.end]);
            ((a.min(b), a.max(b)), i)
        })
        .collect();

    let sc = int(p.scale());
    let x0 = start.scale(&sc);
    let dv = d.to_vector();
    let s_end = {
        let delta = &end.scale(&sc) - &x0;
        if d.a != 0 {
            delta.alpha / int(d.a)
        } else {
            delta.beta / int(d.b)
        }
    };

    // Per family: current coordinate, its rate along the walk, next line.
    let coord = |x: &LatticeVector, f: Family| match f {
        Family::Alpha => x.alpha.clone(),
        Family::Beta => x.beta.clone(),
        Family::Sum => &x.alpha + &x.beta,
    };
    let rate = |f: Family| match f {
        Family::Alpha => d.a,
        Family::Beta => d.b,
        Family::Sum => d.a + d.b,
    };
    let mut next_line: Vec<(Family, i64)> = Vec::new();
    for f in [Family::Alpha, Family::Beta, Family::Sum] {
        let r = rate(f);
        if r == 0 {
            continue;
        }
        let c = coord(&x0, f);
        let k = if r > 0 { floor_i64(&c) + 1 } else { -floor_i64(&(-c)) - 1 };
        next_line.push((f, k));
    }
    let crossing = |f: Family, k: i64| (int(k) - coord(&x0, f)) / int(rate(f));

    let mut map = AffineMap::identity();
    let first = BilliardState { point: bp0, dir: d };
    let mut footprint = vec![first.clone()];
    loop {
        let params: Vec<Rational> = next_line.iter().map(|&(f, k)| crossing(f, k)).collect();
        let s_min = params.iter().min().expect("some family is crossed").clone();
        if s_min > s_end {
            let steps = footprint.len();
            return Ok(Orbit {
                level: p.level(),
                initial: init,
                footprint,
                status: OrbitStatus::Truncated { steps },
                backward: vec![],
            });
        }
        let x = &x0 + &dv.scale(&s_min);
        let tied = params.iter().filter(|s| **s == s_min).count();
        if tied > 1 {
            return Err(Error::VertexCollision { level: p.level(), point: x.scale(&(int(1) / &sc)).to_string() });
        }
        for (j, s) in params.iter().enumerate() {
            if *s == s_min {
                let r = rate(next_line[j].0);
                next_line[j].1 += r.signum();
            }
        }
        let y = map.apply(&x);
        let key = grid_edge(&y);
        if let Some(&side) = edges.get(&key) {
            let sd = p.side(side);
            let (pa, pb) = p.grid()[sd.start];
            let (qa, qb) = p.grid()[sd.end];
            let t = if qa != pa { (&y.alpha - int(pa)) / int(qa - pa) } else { (&y.beta - int(pb)) / int(qb - pb) };
            map = AffineMap::reflection(sd.orientation, &y).after(&map);
            let state = BilliardState { point: BoundaryPoint::new(side, t), dir: map.apply_dir(d) };
            if s_min == s_end {
                let status = if state == first {
                    OrbitStatus::Periodic { period: footprint.len() }
                } else {
                    footprint.push(state);
                    OrbitStatus::Truncated { steps: footprint.len() }
                };
                return Ok(Orbit { level: p.level(), initial: init, footprint, status, backward: vec![] });
            }
            footprint.push(state);
        } else if s_min == s_end {
            let steps = footprint.len();
            return Ok(Orbit {
                level: p.level(),
                initial: init,
                footprint,
                status: OrbitStatus::Truncated { steps },
                backward: vec![],
            });
        }
    }
}

/// The unit grid edge containing a grid-line point that is not a vertex.
fn grid_edge(y: &LatticeVector) -> ((i64, i64), (i64, i64)) {
    let (a, b) = (&y.alpha, &y.beta);
    let ends = if b.is_integer() {
        let j = b.to_integer().to_i64().unwrap();
        let i = floor_i64(a);
        ((i, j), (i + 1, j))
    } else if a.is_integer() {
        let i = a.to_integer().to_i64().unwrap();
        let j = floor_i64(b);
        ((i, j), (i, j + 1))
    } else {
        let m = (a + b).to_integer().to_i64().unwrap();
        let i = floor_i64(a);
        ((i, m - i), (i + 1, m - i - 1))
    };
    (ends.0.min(ends.1), ends.0.max(ends.1))
}

/// Scale-`k` lattice points on the closed segment `start -> end`.
pub fn lattice_hits_on_segment(start: &LatticePoint, end: &LatticePoint, k: u32) -> Vec<LatticePoint> {
    let s = int(3i64.pow(k));
    let a = start.scale(&s);
    let b = end.scale(&s);
    let d = &b - &a;
    let mut out = Vec::new();
    if d.is_zero() {
        return out;
    }
    // Walk integer beta (or alpha) rows and test the other coordinate.
    let (lo, hi, use_beta) = if !d.beta.is_zero() {
        (a.beta.clone().min(b.beta.clone()), a.beta.clone().max(b.beta.clone()), true)
    } else {
        (a.alpha.clone().min(b.alpha.clone()), a.alpha.clone().max(b.alpha.clone()), false)
    };
    let mut j = lo.ceil().to_integer();
    while Rational::from_integer(j.clone()) <= hi {
        let jr = Rational::from_integer(j.clone());
        let u = if use_beta { (&jr - &a.beta) / &d.beta } else { (&jr - &a.alpha) / &d.alpha };
        let x = &a + &d.scale(&u);
        if x.alpha.is_integer() && x.beta.is_integer() {
            out.push(x.scale(&(int(1) / &s)));
        }
        j += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::run_orbit;
    use crate::exact::rat;
    use crate::prefractal::build_prefractal;

    fn periodic(level: u32, t: Rational, a: i64, b: i64) -> (Prefractal, Orbit) {
        let p = build_prefractal(level).unwrap();
        let init = InitialCondition::new(&p, BoundaryPoint::new(0, t), Direction::exact(a, b).unwrap()).unwrap();
        let o = run_orbit(&p, &init, 10_000).unwrap();
        (p, o)
    }

    #[test]
    fn unfold_counts_copies() {
        let (p, o) = periodic(0, rat(7, 12), 0, 1);
        let u = unfold_orbit(&p, &o).unwrap();
        assert_eq!(u.copies, 6);
        assert_eq!(u.dir, LatticeDir { a: 0, b: 1 });
    }

    #[test]
    fn fold_inverts_unfold() {
        for (t, a, b) in [(rat(7, 12), 0, 1), (rat(1, 4), 1, 1), (rat(3, 8), 2, 1), (rat(1, 4), 3, 1)] {
            let (p, o) = periodic(0, t, a, b);
            let u = unfold_orbit(&p, &o).unwrap();
            let f = fold_segment(&p, &u.start, &u.end).unwrap();
            assert_eq!(f.status, o.status);
            assert_eq!(f.footprint, o.footprint);
        }
    }

    #[test]
    fn fold_at_level_one() {
        let (p, o) = periodic(1, rat(3, 4), 1, 1);
        assert!(o.period().is_some());
        let u = unfold_orbit(&p, &o).unwrap();
        let f = fold_segment(&p, &u.start, &u.end).unwrap();
        assert_eq!(f.footprint, o.footprint);
    }

    #[test]
    fn level_zero_translation_is_integral() {
        let (p, o) = periodic(0, rat(1, 4), 1, 1);
        let u = unfold_orbit(&p, &o).unwrap();
        let delta = &u.end - &u.start;
        assert!(delta.alpha.is_integer() && delta.beta.is_integer());
    }

    #[test]
    fn collision_is_reported() {
        let p = build_prefractal(1).unwrap();
        // From (1/6, 0) through (2/3, 1/3), a scale-1 lattice point.
        let start = LatticeVector::new(rat(1, 6), int(0));
        let end = LatticeVector::new(rat(5, 3), int(1));
        assert!(matches!(fold_segment(&p, &start, &end), Err(Error::VertexCollision { .. })));
    }

    #[test]
    fn lattice_hits() {
        let start = LatticeVector::new(rat(1, 2), int(0));
        let end = LatticeVector::new(rat(3, 2), int(2));
        let hits = lattice_hits_on_segment(&start, &end, 1);
        assert!(hits.contains(&LatticeVector::new(rat(2, 3), rat(1, 3))));
    }
}
