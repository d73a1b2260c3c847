//! The billiard map on Ω(KSₙ): exact ray casting, reflection, periodicity
//! and corner detection, footprints and hybrid classification.

mod ray;
mod unfold;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{LatticeDir, LatticePoint, Rational};
use crate::prefractal::{BoundaryPoint, Prefractal};
use crate::ternary::{classify, is_hybrid_admissible, is_stabilizing_type, TernaryType};

pub use ray::{cast_ray, Hit, HitLocation};
pub use unfold::{fold_segment, lattice_hits_on_segment, unfold_orbit, AffineMap, Unfolding};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// Named directions: name, lattice pair, Cartesian angle from the base.
pub const NAMED_ANGLES: [(&str, i64, i64, f64); 4] = [
    ("pi/6", 1, 1, std::f64::consts::FRAC_PI_6),
    ("pi/3", 0, 1, std::f64::consts::FRAC_PI_3),
    ("pi/2", -1, 2, std::f64::consts::FRAC_PI_2),
    ("5pi/6", -2, 1, 5.0 * std::f64::consts::FRAC_PI_6),
];

/// Direction of travel. Irrational directions carry a float angle for
/// drawing and are never traced exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum Direction {
    Exact(LatticeDir),
    SymbolicIrrational { tag: String, angle: f64 },
}

impl Direction {
    pub fn exact(a: i64, b: i64) -> Result<Direction> {
        LatticeDir::new(a, b).map(Direction::Exact).ok_or_else(|| Error::Domain("zero direction".into()))
    }

    pub fn as_exact(&self) -> Option<LatticeDir> {
        match self {
            Direction::Exact(d) => Some(*d),
            Direction::SymbolicIrrational { .. } => None,
        }
    }

    /// `a,b` as a lattice pair, a name from [`NAMED_ANGLES`], or
    /// `irrational:<radians>` for a symbolic irrational direction.
    pub fn parse(s: &str) -> Result<Direction> {
        let s = s.trim();
        if let Some(&(_, a, b, _)) = NAMED_ANGLES.iter().find(|(n, ..)| *n == s) {
            return Direction::exact(a, b);
        }
        if let Some(rest) = s.strip_prefix("irrational:") {
            let angle: f64 = rest.parse().map_err(|_| Error::Domain(format!("bad angle {rest:?}")))?;
            return Ok(Direction::SymbolicIrrational { tag: rest.to_string(), angle });
        }
        let (a, b) = s.split_once(',').ok_or_else(|| Error::Domain(format!("unknown direction {s:?}")))?;
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|_| Error::Domain(format!("bad component {x:?}")));
        Direction::exact(parse(a)?, parse(b)?)
    }

    pub fn angle(&self) -> f64 {
        match self {
            Direction::Exact(d) => d.angle(),
            Direction::SymbolicIrrational { angle, .. } => *angle,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Direction::Exact(d) => json!([d.a, d.b]),
            Direction::SymbolicIrrational { tag, angle } => json!({ "irrational": tag, "angle": angle }),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Exact(d) => write!(f, "({},{})", d.a, d.b),
            Direction::SymbolicIrrational { tag, .. } => write!(f, "irrational:{tag}"),
        }
    }
}

/// Start of an orbit: a non-vertex boundary point and an inward direction.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition {
    pub point: BoundaryPoint,
    pub direction: Direction,
}

impl InitialCondition {
    /// Validates the basepoint and that `direction` points strictly into the
    /// table. Vertex basepoints are rejected.
    pub fn new(p: &Prefractal, point: BoundaryPoint, direction: Direction) -> Result<Self> {
        if point.side >= p.num_sides() {
            return Err(Error::Domain(format!("side {} does not exist", point.nu())));
        }
        if point.t <= crate::exact::int(0) || point.t >= crate::exact::int(1) {
            return Err(Error::Domain(format!(
                "basepoint t = {} on side {} is a vertex or off the side",
                point.t,
                point.nu()
            )));
        }
        let inward = match &direction {
            Direction::Exact(d) => p.side_vector(point.side).cross(&d.to_vector()) > Rational::zero(),
            Direction::SymbolicIrrational { angle, .. } => {
                let (ex, ey) = crate::exact::to_cartesian(&p.side_vector(point.side));
                ex * angle.sin() - ey * angle.cos() > 0.0
            }
        };
        if !inward {
            return Err(Error::Domain(format!(
                "direction {direction} does not point into the table at side {}",
                point.nu()
            )));
        }
        Ok(InitialCondition { point, direction })
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.point.to_json();
        v["dir"] = self.direction.to_json();
        v
    }
}

/// A boundary point together with the outgoing direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BilliardState {
    pub point: BoundaryPoint,
    pub dir: LatticeDir,
}

impl BilliardState {
    pub fn to_json(&self) -> Value {
        let mut v = self.point.to_json();
        v["dir"] = json!([self.dir.a, self.dir.b]);
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Bounce(BilliardState),
    Corner { vertex: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    Periodic {
        period: usize,
    },
    /// Saddle connection between two vertices. `backward_corner` is `None`
    /// when the backward search ran out of steps.
    Singular {
        forward_corner: usize,
        backward_corner: Option<usize>,
    },
    Truncated {
        steps: usize,
    },
    DenseByDirection,
}

impl OrbitStatus {
    pub fn is_closed(&self) -> bool {
        matches!(self, OrbitStatus::Periodic { .. } | OrbitStatus::Singular { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            OrbitStatus::Periodic { .. } => "Periodic",
            OrbitStatus::Singular { .. } => "Singular",
            OrbitStatus::Truncated { .. } => "Truncated",
            OrbitStatus::DenseByDirection => "DenseByDirection",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            OrbitStatus::Periodic { period } => json!({ "kind": "Periodic", "period": period }),
            OrbitStatus::Singular { forward_corner, backward_corner } => json!({
                "kind": "Singular",
                "forward_corner": forward_corner + 1,
                "backward_corner": backward_corner.map(|v| v + 1),
            }),
            OrbitStatus::Truncated { steps } => json!({ "kind": "Truncated", "steps": steps }),
            OrbitStatus::DenseByDirection => json!({ "kind": "DenseByDirection" }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub level: u32,
    pub initial: InitialCondition,
    /// Forward states starting with the initial one.
    pub footprint: Vec<BilliardState>,
    pub status: OrbitStatus,
    /// For singular orbits, states reached by running time backward from
    /// the initial condition, nearest first.
    pub backward: Vec<BilliardState>,
}

impl Orbit {
    pub fn period(&self) -> Option<usize> {
        match self.status {
            OrbitStatus::Periodic { period } => Some(period),
            _ => None,
        }
    }

    /// Distinct basepoints of the forward and backward parts.
    pub fn basepoints(&self) -> BTreeSet<BoundaryPoint> {
        self.footprint.iter().chain(&self.backward).map(|s| s.point.clone()).collect()
    }

    /// Retracing orbit: some bounce sends the ball straight back.
    pub fn is_degenerate(&self) -> bool {
        let n = self.footprint.len();
        if n < 2 {
            return false;
        }
        let closed = matches!(self.status, OrbitStatus::Periodic { .. });
        (1..n + usize::from(closed)).any(|i| {
            let prev = self.footprint[i - 1].dir;
            self.footprint[i % n].dir == prev.reversed()
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "initial": self.initial.to_json(),
            "status": self.status.to_json(),
            "footprint": self.footprint.iter().map(|s| {
                let mut v = s.to_json();
                v["type"] = json!(classify(&s.point.t).map(|t| t.to_string()).unwrap_or_default());
                v
            }).collect::<Vec<_>>(),
            "backward": self.backward.iter().map(BilliardState::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Incoming direction reversed: the state that retraces the path arriving
/// at `s`.
pub fn reverse_state(p: &Prefractal, s: &BilliardState) -> BilliardState {
    let o = p.side(s.point.side).orientation;
    BilliardState { point: s.point.clone(), dir: s.dir.reflect(o).reversed() }
}

pub fn billiard_step(p: &Prefractal, s: &BilliardState) -> Result<StepOutcome> {
    let from = p.position(&s.point);
    let hit = cast_ray(p, &from, s.dir)?;
    Ok(match hit.location {
        HitLocation::Corner(v) => StepOutcome::Corner { vertex: v },
        HitLocation::SideInterior(bp) => {
            let o = p.side(bp.side).orientation;
            StepOutcome::Bounce(BilliardState { point: bp, dir: s.dir.reflect(o) })
        }
    })
}

pub fn run_orbit(p: &Prefractal, init: &InitialCondition, max_steps: usize) -> Result<Orbit> {
    let dir = match &init.direction {
        Direction::Exact(d) => *d,
        Direction::SymbolicIrrational { .. } => {
            return Ok(Orbit {
                level: p.level(),
                initial: init.clone(),
                footprint: vec![],
                status: OrbitStatus::DenseByDirection,
                backward: vec![],
            })
        }
    };
    if max_steps == 0 {
        return Err(Error::Domain("max_steps must be positive".into()));
    }
    let start = BilliardState { point: init.point.clone(), dir };
    let mut seen: HashMap<BilliardState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut footprint = vec![start.clone()];
    let mut cur = start.clone();
    for _ in 0..max_steps {
        match billiard_step(p, &cur)? {
            StepOutcome::Bounce(next) => {
                if let Some(&k) = seen.get(&next) {
                    if k != 0 {
                        return Err(Error::Verification(format!(
                            "orbit re-entered its footprint at index {k}; the billiard map is not injective here"
                        )));
                    }
                    let period = footprint.len();
                    return Ok(Orbit {
                        level: p.level(),
                        initial: init.clone(),
                        footprint,
                        status: OrbitStatus::Periodic { period },
                        backward: vec![],
                    });
                }
                seen.insert(next.clone(), footprint.len());
                footprint.push(next.clone());
                cur = next;
            }
            StepOutcome::Corner { vertex } => {
                let (backward, backward_corner) = trace_until_corner(p, &reverse_state(p, &start), max_steps)?;
                return Ok(Orbit {
                    level: p.level(),
                    initial: init.clone(),
                    footprint,
                    status: OrbitStatus::Singular { forward_corner: vertex, backward_corner },
                    backward,
                });
            }
        }
    }
    Ok(Orbit {
        level: p.level(),
        initial: init.clone(),
        footprint,
        status: OrbitStatus::Truncated { steps: max_steps },
        backward: vec![],
    })
}

/// Follows the time-reversed orbit, recording the states with their
/// original (forward) directions.
fn trace_until_corner(
    p: &Prefractal,
    start: &BilliardState,
    max_steps: usize,
) -> Result<(Vec<BilliardState>, Option<usize>)> {
    let mut out = Vec::new();
    let mut cur = start.clone();
    for _ in 0..max_steps {
        match billiard_step(p, &cur)? {
            StepOutcome::Corner { vertex } => return Ok((out, Some(vertex))),
            StepOutcome::Bounce(next) => {
                out.push(reverse_state(p, &next));
                cur = next;
            }
        }
    }
    Ok((out, None))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionClass {
    Closed,
    Dense,
}

/// Rational directions give closed orbits at every level, irrational ones
/// dense orbits.
pub fn classify_direction(d: &Direction) -> DirectionClass {
    match d {
        Direction::Exact(_) => DirectionClass::Closed,
        Direction::SymbolicIrrational { .. } => DirectionClass::Dense,
    }
}

/// Whether a basepoint counts toward the hybrid condition. `[lr,c]` is
/// accepted alongside the listed admissible types.
pub fn counts_as_hybrid(ty: TernaryType) -> bool {
    is_hybrid_admissible(ty) || is_stabilizing_type(ty)
}

/// Distinct basepoints whose type fails [`counts_as_hybrid`]. Corners of a
/// saddle connection are not listed here; [`is_hybrid`] adds them.
pub fn hybrid_failures(o: &Orbit) -> Vec<BoundaryPoint> {
    o.basepoints().into_iter().filter(|bp| !classify(&bp.t).map(counts_as_hybrid).unwrap_or(false)).collect()
}

/// At most two basepoints of the closed footprint fail the admissible types.
pub fn is_hybrid(o: &Orbit) -> Result<bool> {
    match o.status {
        OrbitStatus::Periodic { .. } => Ok(hybrid_failures(o).len() <= 2),
        OrbitStatus::Singular { forward_corner, backward_corner: Some(b) } => {
            let corners = if b == forward_corner { 1 } else { 2 };
            Ok(hybrid_failures(o).len() + corners <= 2)
        }
        _ => Err(Error::TruncatedOrbit),
    }
}

/// Hybrid verdict on whatever part of the footprint has been computed.
pub fn is_hybrid_prefix(o: &Orbit) -> bool {
    hybrid_failures(o).len() <= 2
}

/// Cartesian polyline of the orbit (forward part, closed for periodic orbits).
pub fn orbit_polyline(p: &Prefractal, o: &Orbit) -> Vec<(f64, f64)> {
    let mut pts: Vec<LatticePoint> = o.backward.iter().rev().map(|s| p.position(&s.point)).collect();
    pts.extend(o.footprint.iter().map(|s| p.position(&s.point)));
    match o.status {
        OrbitStatus::Periodic { .. } => {
            if let Some(first) = o.footprint.first() {
                pts.push(p.position(&first.point));
            }
        }
        OrbitStatus::Singular { forward_corner, .. } => pts.push(p.vertex(forward_corner).clone()),
        _ => {}
    }
    pts.iter().map(crate::exact::to_cartesian).collect()
}

/// Ternary type of each forward basepoint, in order.
pub fn footprint_types(o: &Orbit) -> Vec<TernaryType> {
    o.footprint.iter().map(|s| classify(&s.point.t).expect("side fractions lie in [0,1]")).collect()
}

impl BoundaryPoint {
    pub fn is_interior(&self) -> bool {
        !self.t.is_zero() && !self.t.is_one()
    }
}
