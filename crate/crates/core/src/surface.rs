//! Combinatorial invariants of the translation surface glued from six
//! dihedral copies of a prefractal: vertex angles, Euler characteristic,
//! genus, cone points, hexagonal tilings and the cover of the hexagonal
//! torus.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::prefractal::{build_prefractal_capped, PointLocation, Prefractal, MAX_LEVEL};

/// Dihedral copies glued into the surface.
pub const NUM_COPIES: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngleCensus {
    /// Interior angle π/3.
    pub acute: usize,
    /// Interior angle 4π/3.
    pub reflex: usize,
}

/// Interior angle of every vertex as `π·p/q`, in lowest terms.
pub fn vertex_angles(p: &Prefractal) -> Result<Vec<(i64, i64)>> {
    let g = p.grid();
    let m = g.len();
    (0..m)
        .map(|i| {
            let prev = g[(i + m - 1) % m];
            let cur = g[i];
            let next = g[(i + 1) % m];
            let u = (cur.0 - prev.0, cur.1 - prev.1);
            let w = (next.0 - cur.0, next.1 - cur.1);
            let cross = u.0 * w.1 - u.1 * w.0;
            // Twice the Euclidean dot product and squared lengths, in the
            // lattice basis.
            let dot2 = 2 * (u.0 * w.0 + u.1 * w.1) + u.0 * w.1 + u.1 * w.0;
            let uu = 2 * (u.0 * u.0 + u.1 * u.1 + u.0 * u.1);
            let ww = 2 * (w.0 * w.0 + w.1 * w.1 + w.0 * w.1);
            if uu != ww {
                return Err(Error::Verification(format!("sides at vertex {} differ in length", i + 1)));
            }
            match (cross.signum(), 2 * dot2) {
                // Left turn by 2π/3.
                (1, d) if d == -uu => Ok((1, 3)),
                // Right turn by π/3.
                (-1, d) if d == uu => Ok((4, 3)),
                _ => Err(Error::Verification(format!("vertex {} has an angle other than π/3 or 4π/3", i + 1))),
            }
        })
        .collect()
}

pub fn vertex_angle_census(p: &Prefractal) -> Result<AngleCensus> {
    let angles = vertex_angles(p)?;
    let acute = angles.iter().filter(|a| **a == (1, 3)).count();
    Ok(AngleCensus { acute, reflex: angles.len() - acute })
}

/// `χ = N·Σ 1/q_j − N·ν + 2N` over vertex angles `π·p_j/q_j`, with `N` the
/// least common multiple of the `q_j`.
pub fn euler_from_angles(angles: &[(i64, i64)]) -> Result<i64> {
    let n = angles.iter().fold(1i64, |acc, &(_, q)| acc.lcm(&q));
    let nu = angles.len() as i64;
    let sum: Rational = angles.iter().map(|&(_, q)| Rational::new(1.into(), q.into())).sum();
    let chi = int(n) * sum - int(n * nu) + int(2 * n);
    if !chi.is_integer() {
        return Err(Error::Verification(format!("Euler characteristic {chi} is not an integer")));
    }
    chi.to_integer().to_i64().ok_or_else(|| Error::Resource("Euler characteristic overflow".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeClass {
    /// Cone angle as a multiple of 2π.
    pub multiple: u32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceCensus {
    pub level: u32,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub cone_points: Vec<ConeClass>,
    pub cover_degree: BigInt,
    pub num_copies: u32,
    pub angles: AngleCensus,
}

impl SurfaceCensus {
    /// `χ` from the cone census alone: `Σ (1 − multiple)·count`.
    pub fn gauss_bonnet_chi(&self) -> i64 {
        self.cone_points.iter().map(|c| (1 - c.multiple as i64) * c.count as i64).sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "euler_characteristic": self.euler_characteristic,
            "genus": self.genus,
            "cone_points": self.cone_points.iter().map(|c| json!({"multiple": c.multiple, "count": c.count})).collect::<Vec<_>>(),
            "cover_degree": self.cover_degree.to_string(),
            "num_copies": self.num_copies,
            "acute_angle": "pi/3",
            "acute": self.angles.acute,
            "reflex": self.angles.reflex,
        })
    }

    pub const TABLE_HEADER: &'static str = "level\tchi\tgenus\tremovable\tnonremovable\tdegree";

    pub fn table_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.level, self.euler_characteristic, self.genus, self.angles.acute, self.angles.reflex, self.cover_degree
        )
    }
}

pub fn surface_census(n: u32) -> Result<SurfaceCensus> {
    let p = build_prefractal_capped(n, MAX_LEVEL)?;
    census_of(&p)
}

pub fn census_of(p: &Prefractal) -> Result<SurfaceCensus> {
    let angles = vertex_angles(p)?;
    let chi = euler_from_angles(&angles)?;
    if (2 - chi) % 2 != 0 {
        return Err(Error::Verification(format!("odd Euler characteristic {chi}")));
    }
    let census = vertex_angle_census(p)?;
    // An angle π·p/3 opens into a single cone point of angle 2π·p.
    let cone_points =
        vec![ConeClass { multiple: 1, count: census.acute }, ConeClass { multiple: 4, count: census.reflex }];
    Ok(SurfaceCensus {
        level: p.level(),
        euler_characteristic: chi,
        genus: (2 - chi) / 2,
        cone_points,
        cover_degree: cover_degree(p)?,
        num_copies: NUM_COPIES,
        angles: census,
    })
}

/// Area of the six copies over the area of the hexagonal torus whose
/// fundamental hexagon has side `3^-(n+1)`.
fn cover_degree(p: &Prefractal) -> Result<BigInt> {
    let hex_cells = Rational::from_integer(BigInt::from(9u32).pow(p.level() + 1));
    let d = p.area_ratio() * hex_cells;
    if !d.is_integer() || d <= Rational::zero() {
        return Err(Error::Verification(format!("cover degree {d} is not a positive integer")));
    }
    Ok(d.to_integer())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub level: u32,
    pub degree: BigInt,
    /// `Σ (e_i − 1)` over the branch fiber; each 8π point has index 4.
    pub ramification_sum: i64,
    pub euler_characteristic: i64,
    pub riemann_hurwitz_ok: bool,
}

impl CoverReport {
    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "degree": self.degree.to_string(),
            "ramification_sum": self.ramification_sum,
            "euler_characteristic": self.euler_characteristic,
            "riemann_hurwitz_ok": self.riemann_hurwitz_ok,
        })
    }
}

/// Checks `χ = −Σ (e_i − 1)` for the cover of the once-punctured hexagonal
/// torus, and that the ramification sum equals `6·4ⁿ − 6`.
pub fn cover_consistency(n: u32) -> Result<CoverReport> {
    if n == 0 {
        return Err(Error::Domain("cover check needs n >= 1".into()));
    }
    let c = surface_census(n)?;
    let ramification_sum = 3 * c.angles.reflex as i64;
    let closed = 6 * 4i64.pow(n) - 6;
    let ok = -c.euler_characteristic == ramification_sum && ramification_sum == closed;
    if !ok {
        return Err(Error::Verification(format!(
            "ramification sum {ramification_sum}, chi {}, expected {closed}",
            c.euler_characteristic
        )));
    }
    Ok(CoverReport {
        level: n,
        degree: c.cover_degree,
        ramification_sum,
        euler_characteristic: c.euler_characteristic,
        riemann_hurwitz_ok: ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularCenter {
    /// 1-based vertex index.
    pub vertex: usize,
    /// Grid point `(i, j) / 3^k`.
    pub center: (i64, i64),
    pub is_tile_center: bool,
    /// Scale-`k` triangles of one copy meeting at the vertex.
    pub triangles: usize,
    /// Interior angle in units of π/3.
    pub expected: usize,
}

impl SingularCenter {
    pub fn ok(&self) -> bool {
        self.is_tile_center && self.triangles == self.expected
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexTiling {
    pub level: u32,
    pub scale: u32,
    /// Scale-`k` triangles inside one copy.
    pub triangles: usize,
    /// Hexagon centers meeting one copy, with the number of its triangles
    /// in that copy.
    pub tiles: BTreeMap<(i64, i64), usize>,
    pub singularities: Vec<SingularCenter>,
    /// Triangle areas add up to the polygon area exactly.
    pub area_ok: bool,
}

impl HexTiling {
    pub fn all_singularities_centered(&self) -> bool {
        self.singularities.iter().all(SingularCenter::ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "scale": self.scale,
            "copies": NUM_COPIES,
            "triangles": self.triangles,
            "tiles": self.tiles.len(),
            "area_ok": self.area_ok,
            "singularities": self.singularities.iter().map(|s| json!({
                "vertex": s.vertex,
                "center": [s.center.0, s.center.1],
                "is_tile_center": s.is_tile_center,
                "triangles": s.triangles,
                "expected": s.expected,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Hexagon centers of the scale-`k` tiling: grid points with `i ≡ j (mod 3)`.
pub fn is_hex_center(i: i64, j: i64) -> bool {
    (i - j).rem_euclid(3) == 0
}

/// Tiles one copy of `Ω(KSₙ)` by scale-`k` triangles and groups them into
/// hexagons around the centers; every triangle has exactly one center
/// among its corners.
pub fn hex_tiling(n: u32, k: u32) -> Result<HexTiling> {
    if k <= n {
        return Err(Error::Domain(format!("tile scale {k} must exceed level {n}")));
    }
    if k > MAX_LEVEL {
        return Err(Error::Resource(format!("tile scale {k} above {MAX_LEVEL}")));
    }
    let p = build_prefractal_capped(n, MAX_LEVEL)?;
    let f = 3i64.pow(k - n);
    let verts: Vec<(i64, i64)> = p.grid().iter().map(|&(a, b)| (a * f, b * f)).collect();
    let index: HashMap<(i64, i64), usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let (lo_a, hi_a) = bounds(verts.iter().map(|v| v.0));
    let (lo_b, hi_b) = bounds(verts.iter().map(|v| v.1));

    let mut triangles = 0usize;
    let mut tiles: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut at_vertex = vec![0usize; verts.len()];
    for i in lo_a - 1..=hi_a {
        for j in lo_b - 1..=hi_b {
            let shapes = [
                ([(i, j), (i + 1, j), (i, j + 1)], (3 * i + 1, 3 * j + 1)),
                ([(i + 1, j), (i, j + 1), (i + 1, j + 1)], (3 * i + 2, 3 * j + 2)),
            ];
            for (tri, centroid) in shapes {
                if p.locate_grid_point(centroid.0, centroid.1, k + 1) != PointLocation::Inside {
                    continue;
                }
                triangles += 1;
                let centers: Vec<_> = tri.iter().filter(|v| is_hex_center(v.0, v.1)).collect();
                if centers.len() != 1 {
                    return Err(Error::Verification(format!("triangle at ({i}, {j}) has {} centers", centers.len())));
                }
                *tiles.entry(*centers[0]).or_default() += 1;
                for v in &tri {
                    if let Some(&vi) = index.get(v) {
                        at_vertex[vi] += 1;
                    }
                }
            }
        }
    }
    let angles = vertex_angles(&p)?;
    let singularities = verts
        .iter()
        .enumerate()
        .map(|(vi, &(a, b))| SingularCenter {
            vertex: vi + 1,
            center: (a, b),
            is_tile_center: is_hex_center(a, b),
            triangles: at_vertex[vi],
            expected: angles[vi].0 as usize,
        })
        .collect();
    let cell = Rational::new(1.into(), BigInt::from(9u32).pow(k));
    let area_ok = int(triangles as i64) * cell == p.area_ratio();
    Ok(HexTiling { level: n, scale: k, triangles, tiles, singularities, area_ok })
}

fn bounds(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}
