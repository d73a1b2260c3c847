//! First boundary hit along a ray.
//!
//! A float pass over all sides proposes candidates; each candidate is then
//! decided exactly on the integer grid of the polygon. If the float pass
//! yields nothing usable the exact scan runs over every side.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, LatticeDir, LatticePoint, Rational};
use crate::prefractal::{BoundaryPoint, Prefractal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HitLocation {
    SideInterior(BoundaryPoint),
    Corner(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub point: LatticePoint,
    pub location: HitLocation,
}

const TOL: f64 = 1e-9;

/// Exact ray/side intersection in grid units: returns `(s, u)` with the hit
/// at `from + s * dir / scale` and `u` the fraction along the side.
struct Exact {
    s: Rational,
    u: Rational,
}

enum SideTest {
    Hit(Exact),
    Miss,
    /// The ray runs along this side starting on it.
    Along,
}

fn exact_test(p: &Prefractal, side: usize, fa: &Rational, fb: &Rational, d: LatticeDir) -> SideTest {
    let s = p.side(side);
    let (pa, pb) = p.grid()[s.start];
    let (qa, qb) = p.grid()[s.end];
    let (ea, eb) = (qa - pa, qb - pb);
    let den = d.a * eb - d.b * ea;
    let wa = int(pa) - fa;
    let wb = int(pb) - fb;
    if den == 0 {
        // Parallel: only matters when the ray starts on this side's line
        // inside the side and heads along it.
        let on_line = (&wa * BigInt::from(eb) - &wb * BigInt::from(ea)).is_zero();
        if !on_line {
            return SideTest::Miss;
        }
        // Position of `from` along the side, and whether the ray heads
        // toward the side's end (`d` is a positive multiple of `e`).
        let u0 = if ea != 0 { -&wa / int(ea) } else { -&wb / int(eb) };
        let toward_end = d.a * ea + d.b * eb > 0;
        let on_side = !u0.is_negative() && u0 <= Rational::one();
        let ahead = if toward_end { u0 < Rational::one() } else { u0.is_positive() };
        return if on_side && ahead { SideTest::Along } else { SideTest::Miss };
    }
    let den_r = int(den);
    let s_num = &wa * BigInt::from(eb) - &wb * BigInt::from(ea);
    let u_num = &wa * BigInt::from(d.b) - &wb * BigInt::from(d.a);
    let s_val = s_num / &den_r;
    if !s_val.is_positive() {
        return SideTest::Miss;
    }
    let u = u_num / den_r;
    if u.is_negative() || u > Rational::one() {
        return SideTest::Miss;
    }
    SideTest::Hit(Exact { s: s_val, u })
}

/// First point of KSₙ strictly after `from` along `dir`.
pub fn cast_ray(p: &Prefractal, from: &LatticePoint, dir: LatticeDir) -> Result<Hit> {
    let scale = int(p.scale());
    let fa = &from.alpha * &scale;
    let fb = &from.beta * &scale;

    let (fx, fy) = from.to_f64();
    let (dx, dy) = (dir.a as f64, dir.b as f64);
    let fl = p.float_vertices();
    let sc = p.scale() as f64;
    let mut cands: Vec<(f64, usize)> = Vec::new();
    for (i, side) in p.sides().iter().enumerate() {
        let (ax, ay) = fl[side.start];
        let (bx, by) = fl[side.end];
        let (ex, ey) = (bx - ax, by - ay);
        let den = dx * ey - dy * ex;
        let (wx, wy) = (ax - fx, ay - fy);
        if den.abs() < 1e-12 {
            // Parallel in floats; keep it if `from` is close to the side so
            // the exact test can flag a grazing ray.
            let dist = (wx * ey - wy * ex).abs() * sc;
            if dist < TOL {
                cands.push((-1.0, i));
            }
            continue;
        }
        let s = (wx * ey - wy * ex) / den;
        let u = (wx * dy - wy * dx) / den;
        let slack = TOL * (1.0 + s.abs()) * sc;
        if s > -slack && u > -slack && u < 1.0 + slack {
            cands.push((s, i));
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<(Exact, usize)> = None;
    let mut best_f = f64::INFINITY;
    for &(sf, i) in &cands {
        if sf > best_f + TOL * (1.0 + best_f.abs()) {
            break;
        }
        match exact_test(p, i, &fa, &fb, dir) {
            SideTest::Along => return Err(Error::DegenerateRay { side: i + 1 }),
            SideTest::Miss => {}
            SideTest::Hit(e) => {
                if best.as_ref().is_none_or(|(b, _)| e.s < b.s) {
                    best_f = crate::exact::rational_to_f64(&e.s) / sc;
                    best = Some((e, i));
                }
            }
        }
    }
    if best.is_none() {
        for i in 0..p.num_sides() {
            match exact_test(p, i, &fa, &fb, dir) {
                SideTest::Along => return Err(Error::DegenerateRay { side: i + 1 }),
                SideTest::Miss => {}
                SideTest::Hit(e) => {
                    if best.as_ref().is_none_or(|(b, _)| e.s < b.s) {
                        best = Some((e, i));
                    }
                }
            }
        }
    }
    let (e, i) =
        best.ok_or_else(|| Error::Domain(format!("ray from {from} along {dir} never meets KS_{}", p.level())))?;
    let location = if e.u.is_zero() {
        HitLocation::Corner(p.side(i).start)
    } else if e.u.is_one() {
        HitLocation::Corner(p.side(i).end)
    } else {
        HitLocation::SideInterior(BoundaryPoint::new(i, e.u.clone()))
    };
    let point = match &location {
        HitLocation::Corner(v) => p.vertex(*v).clone(),
        HitLocation::SideInterior(bp) => p.position(bp),
    };
    Ok(Hit { point, location })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, LatticeVector};
    use crate::prefractal::build_prefractal;

    /// Brute-force oracle: every side, exact rationals, no grid.
    fn oracle(p: &Prefractal, from: &LatticePoint, d: LatticeDir) -> Option<(Rational, LatticePoint)> {
        let dv = d.to_vector();
        let mut best: Option<(Rational, LatticePoint)> = None;
        for i in 0..p.num_sides() {
            let a = p.vertex(p.side(i).start);
            let e = p.side_vector(i);
            let den = dv.cross(&e);
            if den.is_zero() {
                continue;
            }
            let w = a - from;
            let s = w.cross(&e) / &den;
            let u = w.cross(&dv) / &den;
            if s.is_positive() && !u.is_negative() && u <= Rational::one() {
                let x = from + &dv.scale(&s);
                if best.as_ref().is_none_or(|(b, _)| s < *b) {
                    best = Some((s, x));
                }
            }
        }
        best
    }

    #[test]
    fn base_midpoint_upward() {
        let p = build_prefractal(0).unwrap();
        let from = LatticeVector::new(rat(1, 2), int(0));
        let h = cast_ray(&p, &from, LatticeDir::new(0, 1).unwrap()).unwrap();
        assert_eq!(h.point, LatticeVector::new(rat(1, 2), rat(1, 2)));
        assert_eq!(h.location, HitLocation::SideInterior(BoundaryPoint::new(1, rat(1, 2))));
    }

    #[test]
    fn corner_to_opposite_midpoint() {
        let p = build_prefractal(0).unwrap();
        let h = cast_ray(&p, &LatticeVector::zero(), LatticeDir::new(1, 1).unwrap()).unwrap();
        assert_eq!(h.location, HitLocation::SideInterior(BoundaryPoint::new(1, rat(1, 2))));
    }

    #[test]
    fn quarter_point_upward_matches_oracle() {
        let p = build_prefractal(0).unwrap();
        let from = LatticeVector::new(rat(1, 4), int(0));
        let d = LatticeDir::new(0, 1).unwrap();
        let h = cast_ray(&p, &from, d).unwrap();
        let (_, x) = oracle(&p, &from, d).unwrap();
        assert_eq!(h.point, x);
        // 3/4 from (1,0), i.e. 1/4 from the (0,1) end.
        assert_eq!(h.location, HitLocation::SideInterior(BoundaryPoint::new(1, rat(3, 4))));
    }

    #[test]
    fn corner_detection() {
        let p = build_prefractal(1).unwrap();
        let from = LatticeVector::new(rat(1, 2), rat(1, 6));
        // Straight at the apex of the base bump.
        let apex = p.vertex(2).clone();
        let d = LatticeDir::from_vector(&(&apex - &from)).unwrap();
        let h = cast_ray(&p, &from, d).unwrap();
        assert_eq!(h.location, HitLocation::Corner(2));
    }

    #[test]
    fn grazing_is_reported() {
        let p = build_prefractal(0).unwrap();
        let from = LatticeVector::new(rat(1, 2), int(0));
        assert!(matches!(cast_ray(&p, &from, LatticeDir::new(1, 0).unwrap()), Err(Error::DegenerateRay { side: 1 })));
    }

    #[test]
    fn random_rays_agree_with_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for level in 0..=3 {
            let p = build_prefractal(level).unwrap();
            for _ in 0..60 {
                let from = LatticeVector::new(rat(rng.gen_range(1..40), 97), rat(rng.gen_range(1..40), 97));
                let d =
                    LatticeDir::new(rng.gen_range(-7..=7), rng.gen_range(-7..=7)).unwrap_or(LatticeDir { a: 1, b: 2 });
                let h = cast_ray(&p, &from, d).unwrap();
                let (_, x) = oracle(&p, &from, d).unwrap();
                assert_eq!(h.point, x, "level {level} from {from} dir {d}");
            }
        }
    }
}
