//! Polygonal paths through Cantor-point basepoints of compatible orbits,
//! limit estimates, reversal and concatenation.
//!
//! The path of a sequence is read off its deepest member: starting at the
//! seed basepoint, follow the orbit while the basepoints are Cantor points
//! (type `[lr,∅]`); the first basepoint that is not ends the path. Each
//! vertex records the first level whose orbit contains it.

use std::collections::BTreeSet;

use num_traits::One;
use serde_json::{json, Value};

use crate::billiard::{Direction, InitialCondition, Orbit};
use crate::compat::{distance, CompatibleSequence, Tower};
use crate::error::{Error, Result};
use crate::exact::{lattice_dot, rat, to_cartesian, LatticePoint, Rational};
use crate::prefractal::{locate_on_boundary, point_json, BoundaryPoint};
use crate::ternary::{classify, is_cantor_point_type, CharSet, TernaryType};

#[derive(Clone, Debug, PartialEq)]
pub struct PathVertex {
    /// Index in the deepest orbit's footprint.
    pub index: usize,
    /// First member level whose footprint contains this point.
    pub first_level: u32,
    pub point: LatticePoint,
    pub boundary: BoundaryPoint,
    pub ty: TernaryType,
}

impl PathVertex {
    fn to_json(&self) -> Value {
        let (x, y) = to_cartesian(&self.point);
        json!({
            "index": self.index,
            "first_level": self.first_level,
            "point": point_json(&self.point),
            "xy": [x, y],
            "boundary": self.boundary.to_json(),
            "type": self.ty.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitEstimate {
    /// Exact rational point; never claimed to be the limit itself.
    pub point: LatticePoint,
    /// Ratio of the last gap to the previous one, projected onto it.
    pub ratio: Rational,
    pub error_bound: f64,
}

impl LimitEstimate {
    pub fn cartesian(&self) -> (f64, f64) {
        to_cartesian(&self.point)
    }

    fn to_json(&self) -> Value {
        let (x, y) = self.cartesian();
        json!({
            "point": point_json(&self.point),
            "xy": [x, y],
            "ratio": crate::exact::fmt_rational(&self.ratio),
            "error_bound": self.error_bound,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalPath {
    pub seed: InitialCondition,
    pub depth: u32,
    /// Seed basepoint, the Cantor points that follow it, then the terminal
    /// basepoint.
    pub vertices: Vec<PathVertex>,
    pub limit: LimitEstimate,
}

impl PolygonalPath {
    pub fn terminal(&self) -> &PathVertex {
        self.vertices.last().expect("paths have at least two vertices")
    }

    /// Vertices strictly between the seed and the terminal.
    pub fn interior(&self) -> &[PathVertex] {
        &self.vertices[1..self.vertices.len() - 1]
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|w| distance(&w[0].point, &w[1].point)).collect()
    }

    pub fn length(&self) -> f64 {
        self.gaps().iter().sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed.to_json(),
            "depth": self.depth,
            "vertices": self.vertices.iter().map(PathVertex::to_json).collect::<Vec<_>>(),
            "gaps": self.gaps(),
            "length": self.length(),
            "limit": self.limit.to_json(),
        })
    }
}

/// `c` occurs infinitely often: `[c,lr]`, `[cl,r]`, `[cr,l]` or `[lcr,∅]`
/// up to the finite part.
pub fn is_terminal_class(ty: TernaryType) -> bool {
    ty.infinite.contains(CharSet::C)
}

/// Basepoints after the seed up to and including the first that is not a
/// Cantor point. `None` when every basepoint is a Cantor point.
fn trail(o: &Orbit) -> Option<(Vec<usize>, usize)> {
    let n = o.footprint.len();
    let mut cantor = Vec::new();
    for k in 1..n {
        let ty = classify(&o.footprint[k].point.t).ok()?;
        if is_cantor_point_type(ty) {
            cantor.push(k);
        } else {
            return Some((cantor, k));
        }
    }
    None
}

fn deepest_orbit(seq: &CompatibleSequence) -> Result<(u32, &Orbit, &InitialCondition)> {
    let m = seq.members.last().ok_or(Error::EmptyDomain)?;
    match (&m.orbit, &m.initial) {
        (Some(o), Some(ic)) if o.period().is_some() => Ok((m.level, o, ic)),
        _ => Err(Error::Domain(format!("level {} is not a periodic orbit", m.level))),
    }
}

pub fn extract_path(tower: &Tower, seq: &CompatibleSequence) -> Result<PolygonalPath> {
    let (depth, orbit, _) = deepest_orbit(seq)?;
    let p = tower.get(depth);
    let (cantor, terminal) = trail(orbit)
        .ok_or_else(|| Error::Domain("every basepoint is a Cantor point; the orbit has no terminal".into()))?;
    if cantor.is_empty() {
        return Err(Error::NoCantorBasepoints);
    }
    let positions: Vec<(u32, BTreeSet<LatticePoint>)> = seq
        .members
        .iter()
        .filter_map(|m| {
            let o = m.orbit.as_ref()?;
            let q = tower.get(m.level);
            Some((m.level, o.footprint.iter().map(|s| q.position(&s.point)).collect()))
        })
        .collect();
    let mut vertices = Vec::new();
    for k in std::iter::once(0).chain(cantor).chain(std::iter::once(terminal)) {
        let bp = orbit.footprint[k].point.clone();
        let point = p.position(&bp);
        let first_level = positions.iter().find(|(_, s)| s.contains(&point)).map_or(depth, |(l, _)| *l);
        vertices.push(PathVertex { index: k, first_level, ty: classify(&bp.t)?, point, boundary: bp });
    }
    let limit = estimate_limit(&vertices, depth);
    let seed = seq.members[0].initial.clone().expect("rational sequences carry initial conditions");
    Ok(PolygonalPath { seed, depth, vertices, limit })
}

/// Geometric extrapolation from the last two gaps: `v + g·ρ/(1-ρ)` with `ρ`
/// the projection of the last gap on the one before. Falls back to `ρ = 1/3`
/// when that projection is not a contraction.
fn estimate_limit(v: &[PathVertex], depth: u32) -> LimitEstimate {
    let n = v.len();
    let last = &v[n - 1].point;
    let g = last - &v[n - 2].point;
    let mut ratio = rat(1, 3);
    if n >= 3 {
        let h = &v[n - 2].point - &v[n - 3].point;
        let r = lattice_dot(&g, &h) / lattice_dot(&h, &h);
        if r > rat(-1, 1) && r < Rational::one() {
            ratio = r;
        }
    }
    let step = &ratio / (Rational::one() - &ratio);
    let point = last + &g.scale(&step);
    let cell = 3f64.powi(-(depth as i32));
    let shift = distance(&point, last);
    LimitEstimate { point, ratio, error_bound: cell.max(shift) }
}

/// The estimate lies on none of `KS_0 ..= KS_depth`.
pub fn limit_off_all_levels(tower: &Tower, path: &PolygonalPath) -> bool {
    (0..=path.depth)
        .all(|n| matches!(locate_on_boundary(tower.get(n), &path.limit.point), Err(Error::NotOnBoundary { .. })))
}

/// Seed of the reversed path: the first bounce of the level-0 orbit with the
/// direction turned around.
pub fn reverse_seed(tower: &Tower, seq: &CompatibleSequence) -> Result<InitialCondition> {
    let m = seq.members.first().ok_or(Error::EmptyDomain)?;
    let o = m.orbit.as_ref().ok_or_else(|| Error::Domain("irrational sequences have no footprint".into()))?;
    if o.footprint.len() < 2 {
        return Err(Error::Domain("footprint has a single basepoint".into()));
    }
    let theta = seq.theta.as_exact().ok_or_else(|| Error::Domain("reversal needs a rational direction".into()))?;
    let p = tower.get(m.level);
    InitialCondition::new(p, o.footprint[1].point.clone(), Direction::Exact(theta.reversed()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinedPath {
    /// From the second path's limit estimate, through the shared anchor, to
    /// the first path's limit estimate.
    pub points: Vec<LatticePoint>,
    /// Both inputs were the same path.
    pub degenerate: bool,
}

impl CombinedPath {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| distance(&w[0], &w[1])).sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": self.points.iter().map(point_json).collect::<Vec<_>>(),
            "xy": self.points.iter().map(|p| { let (x, y) = to_cartesian(p); [x, y] }).collect::<Vec<_>>(),
            "length": self.length(),
            "degenerate": self.degenerate,
        })
    }
}

/// Joins a path with the path of its reversed seed. The two must share the
/// anchor segment: each one's first two vertices are the other's, swapped.
pub fn concatenate(p1: &PolygonalPath, p2: &PolygonalPath) -> Result<CombinedPath> {
    let pts = |p: &PolygonalPath| p.vertices.iter().map(|v| v.point.clone()).collect::<Vec<_>>();
    let (a, b) = (pts(p1), pts(p2));
    if a == b {
        let mut points = a;
        points.push(p1.limit.point.clone());
        return Ok(CombinedPath { points, degenerate: true });
    }
    if a[0] != b[1] || a[1] != b[0] {
        return Err(Error::Domain("paths do not share an anchor segment".into()));
    }
    let mut points = vec![p2.limit.point.clone()];
    points.extend(b[2..].iter().rev().cloned());
    points.extend(a);
    points.push(p1.limit.point.clone());
    Ok(CombinedPath { points, degenerate: false })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeLevel {
    pub level: u32,
    pub cantor_run: usize,
    pub terminal_type: Option<TernaryType>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub levels: Vec<ProbeLevel>,
    /// Every level ends its Cantor run on a type with `c` infinitely often,
    /// and the runs never shorten and eventually grow.
    pub alternation_observed: bool,
    /// Successive gap ratios of the deepest path.
    pub gap_ratios: Vec<f64>,
}

impl ProbeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "levels": self.levels.iter().map(|l| json!({
                "level": l.level,
                "cantor_run": l.cantor_run,
                "terminal_type": l.terminal_type.map(|t| t.to_string()),
            })).collect::<Vec<_>>(),
            "alternation_observed": self.alternation_observed,
            "gap_ratios": self.gap_ratios,
        })
    }
}

/// Evidence for the alternation pattern along the first `depth + 1` members.
/// Reports only; nothing is asserted.
pub fn alternation_probe(tower: &Tower, seq: &CompatibleSequence, depth: u32) -> ProbeReport {
    let mut levels = Vec::new();
    for m in seq.members.iter().filter(|m| m.level <= seq.range.0 + depth) {
        let Some(o) = &m.orbit else { continue };
        let (run, term) = match trail(o) {
            Some((c, k)) => (c.len(), classify(&o.footprint[k].point.t).ok()),
            None => (o.footprint.len(), None),
        };
        levels.push(ProbeLevel { level: m.level, cantor_run: run, terminal_type: term });
    }
    let alternation_observed = !levels.is_empty()
        && levels.iter().all(|l| l.terminal_type.is_some_and(is_terminal_class))
        && levels.windows(2).all(|w| w[0].cantor_run <= w[1].cantor_run)
        && levels.last().unwrap().cantor_run > levels[0].cantor_run;
    let gap_ratios = {
        let truncated = CompatibleSequence {
            theta: seq.theta.clone(),
            range: seq.range,
            members: seq.members.iter().filter(|m| m.level <= seq.range.0 + depth).cloned().collect(),
        };
        match extract_path(tower, &truncated) {
            Ok(p) => {
                let g = p.gaps();
                g.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
            }
            Err(_) => Vec::new(),
        }
    };
    ProbeReport { levels, alternation_observed, gap_ratios }
}

/// Seed of the family whose paths head for an elusive point:
/// the base midpoint aimed at the midpoint of the lower third of the right
/// side.
pub fn midpoint_seed(tower: &Tower) -> Result<InitialCondition> {
    InitialCondition::new(tower.get(0), BoundaryPoint::new(0, rat(1, 2)), Direction::exact(2, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::{build_sequence, hook_seed};

    fn midpoint_family(depth: u32) -> (Tower, CompatibleSequence) {
        let tower = Tower::new(depth).unwrap();
        let seed = midpoint_seed(&tower).unwrap();
        let seq = build_sequence(&tower, 0, &seed, depth, 1_000_000).unwrap();
        (tower, seq)
    }

    #[test]
    fn midpoint_family_path() {
        let (tower, seq) = midpoint_family(4);
        let path = extract_path(&tower, &seq).unwrap();
        assert!(path.interior().len() >= 2);
        for v in path.interior() {
            // Round trip: relocate on the deepest prefractal and reclassify.
            let bp = locate_on_boundary(tower.get(path.depth), &v.point).unwrap();
            assert_eq!(classify(&bp.t).unwrap().to_string(), "[lr,∅]");
        }
        assert!(is_terminal_class(path.terminal().ty));
        let g = path.gaps();
        assert!(g.windows(2).all(|w| w[1] < w[0]), "{g:?}");
        assert!(limit_off_all_levels(&tower, &path));
    }

    #[test]
    fn cantor_vertices_appear_by_level() {
        let (tower, seq) = midpoint_family(4);
        let path = extract_path(&tower, &seq).unwrap();
        let levels: Vec<u32> = path.interior().iter().map(|v| v.first_level).collect();
        assert!(levels.windows(2).all(|w| w[0] <= w[1]), "{levels:?}");
    }

    #[test]
    fn no_cantor_basepoints() {
        let tower = Tower::new(0).unwrap();
        let init =
            InitialCondition::new(tower.get(0), BoundaryPoint::new(0, rat(7, 12)), Direction::exact(0, 1).unwrap())
                .unwrap();
        let seq = build_sequence(&tower, 0, &init, 0, 100).unwrap();
        assert!(matches!(extract_path(&tower, &seq), Err(Error::NoCantorBasepoints)));
    }

    #[test]
    fn reversal_is_an_involution() {
        let (tower, seq) = midpoint_family(2);
        let r = reverse_seed(&tower, &seq).unwrap();
        let rseq = build_sequence(&tower, 0, &r, 2, 1_000_000).unwrap();
        let rr = reverse_seed(&tower, &rseq).unwrap();
        assert_eq!(rr, seq.members[0].initial.clone().unwrap());
    }

    #[test]
    fn forward_and_reversed_paths_join() {
        let (tower, seq) = midpoint_family(4);
        let r = reverse_seed(&tower, &seq).unwrap();
        let rseq = build_sequence(&tower, 0, &r, 4, 1_000_000).unwrap();
        let p1 = extract_path(&tower, &seq).unwrap();
        let p2 = extract_path(&tower, &rseq).unwrap();
        let c = concatenate(&p1, &p2).unwrap();
        assert!(!c.degenerate);
        assert_ne!(c.points.first(), c.points.last());
        assert!(c.length() > p1.length());
        let self_join = concatenate(&p1, &p1).unwrap();
        assert!(self_join.degenerate);
    }

    #[test]
    fn hook_path_has_finite_length() {
        let tower = Tower::new(5).unwrap();
        let seq = build_sequence(&tower, 0, &hook_seed(tower.get(0)).unwrap(), 5, 100_000).unwrap();
        let path = extract_path(&tower, &seq).unwrap();
        let g = path.gaps();
        assert!(g.len() >= 5);
        for w in g[1..].windows(2) {
            assert!(w[1] < 0.5 * w[0], "{g:?}");
        }
        let probe = alternation_probe(&tower, &seq, 4);
        assert!(probe.alternation_observed);
    }

    #[test]
    fn probe_on_midpoint_family() {
        let (tower, seq) = midpoint_family(4);
        assert!(alternation_probe(&tower, &seq, 4).alternation_observed);
    }
}
