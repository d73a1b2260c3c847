//! Compatible initial conditions across levels, sequences of compatible
//! orbits, the closed/dense dichotomy, the odd-`b` seed families, constant
//! sequences and hook orbits.

use std::collections::BTreeSet;

use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::billiard::{
    cast_ray, footprint_types, is_hybrid, run_orbit, Direction, HitLocation, InitialCondition, Orbit, OrbitStatus,
};
use crate::error::{Error, Result};
use crate::exact::{int, rat, rational_to_f64, LatticeDir, LatticePoint, Rational};
use crate::prefractal::{build_prefractal_capped, locate_on_boundary, BoundaryPoint, Prefractal, DEFAULT_LEVEL_CAP};
use crate::ternary::{classify, expand, is_cantor_point_type, is_stabilizing_type, CharSet, TernaryType};

/// Prefractals `KS_0 ..= KS_max`, built once.
#[derive(Clone, Debug)]
pub struct Tower {
    levels: Vec<Prefractal>,
}

impl Tower {
    pub fn new(max_level: u32) -> Result<Tower> {
        Tower::with_cap(max_level, DEFAULT_LEVEL_CAP)
    }

    pub fn with_cap(max_level: u32, cap: u32) -> Result<Tower> {
        let levels = (0..=max_level).map(|n| build_prefractal_capped(n, cap)).collect::<Result<_>>()?;
        Ok(Tower { levels })
    }

    pub fn get(&self, n: u32) -> &Prefractal {
        &self.levels[n as usize]
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    fn check(&self, n: u32) -> Result<&Prefractal> {
        self.levels
            .get(n as usize)
            .ok_or_else(|| Error::Resource(format!("level {n} is above the tower height {}", self.max_level())))
    }
}

/// Whether the closed segment from `a` (on KSₙ) to `b` meets KSₙ only at `a`.
pub fn segment_meets_boundary_only_at(p: &Prefractal, a: &LatticePoint, b: &LatticePoint) -> bool {
    if a == b {
        return true;
    }
    let d = b - a;
    let (ax, ay) = a.to_f64();
    let (bx, by) = b.to_f64();
    let tol = 1e-9;
    for i in 0..p.num_sides() {
        let s = p.side(i);
        let (px, py) = p.vertex(s.start).to_f64();
        let (qx, qy) = p.vertex(s.end).to_f64();
        if px.max(qx) < ax.min(bx) - tol
            || px.min(qx) > ax.max(bx) + tol
            || py.max(qy) < ay.min(by) - tol
            || py.min(qy) > ay.max(by) + tol
        {
            continue;
        }
        let pv = p.vertex(s.start);
        let e = p.side_vector(i);
        let w = pv - a;
        let den = d.cross(&e);
        if den.is_zero() {
            if !w.cross(&d).is_zero() {
                continue;
            }
            // Collinear: compare parameter ranges along `d`.
            let n2 = crate::exact::lattice_dot(&d, &d);
            let t0 = crate::exact::lattice_dot(&w, &d) / &n2;
            let t1 = crate::exact::lattice_dot(&(p.vertex(s.end) - a), &d) / &n2;
            let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            let lo = lo.max(Rational::zero());
            let hi = hi.min(int(1));
            if lo < hi || (lo == hi && !lo.is_zero()) {
                return false;
            }
            continue;
        }
        let sp = w.cross(&e) / &den;
        let u = w.cross(&d) / &den;
        if sp.is_negative() || sp > int(1) || u.is_negative() || u > int(1) {
            continue;
        }
        if !sp.is_zero() {
            return false;
        }
    }
    true
}

/// Basepoint on KSₙ compatible with `point` on KSₘ (`m < n`) in direction
/// `dir`: the point itself if it survives on KSₙ, otherwise the first hit of
/// the backward ray.
pub fn compatible_point(
    tower: &Tower,
    m: u32,
    point: &BoundaryPoint,
    dir: LatticeDir,
    n: u32,
) -> Result<BoundaryPoint> {
    if n <= m {
        return Err(Error::Domain(format!("target level {n} must exceed {m}")));
    }
    let pm = tower.check(m)?;
    let pn = tower.check(n)?;
    let x = pm.position(point);
    let no = |reason: String| Error::NoCompatible { level: n, reason };
    if let Ok(bp) = locate_on_boundary(pn, &x) {
        if bp.is_vertex() {
            return Err(no(format!("{x} is a vertex of KS_{n}")));
        }
        return Ok(bp);
    }
    let hit = match cast_ray(pn, &x, dir.reversed()) {
        Ok(h) => h,
        Err(Error::DegenerateRay { side }) => return Err(no(format!("backward ray runs along side {side}"))),
        Err(e) => return Err(e),
    };
    let bp = match hit.location {
        HitLocation::Corner(v) => return Err(no(format!("backward ray meets the corner {}", pn.vertex(v)))),
        HitLocation::SideInterior(bp) => bp,
    };
    if !segment_meets_boundary_only_at(pn, &hit.point, &x) {
        return Err(no(format!("segment from {} to {x} meets KS_{n} twice", hit.point)));
    }
    Ok(bp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub level: u32,
    /// Absent for irrational directions above the seed level, where the
    /// compatible point is not computed.
    pub initial: Option<InitialCondition>,
    pub orbit: Option<Orbit>,
    pub status: OrbitStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibleSequence {
    pub theta: Direction,
    pub range: (u32, u32),
    pub members: Vec<Member>,
}

impl CompatibleSequence {
    pub fn member(&self, level: u32) -> Option<&Member> {
        self.members.iter().find(|m| m.level == level)
    }

    pub fn orbits(&self) -> impl Iterator<Item = &Orbit> {
        self.members.iter().filter_map(|m| m.orbit.as_ref())
    }

    pub fn to_json(&self) -> Value {
        let members: Vec<Value> = self
            .members
            .iter()
            .map(|m| {
                let mut hist = std::collections::BTreeMap::<String, usize>::new();
                if let Some(o) = &m.orbit {
                    for t in footprint_types(o) {
                        *hist.entry(t.to_string()).or_default() += 1;
                    }
                }
                json!({
                    "level": m.level,
                    "initial": m.initial.as_ref().map(InitialCondition::to_json),
                    "status": m.status.to_json(),
                    "hybrid": m.orbit.as_ref().and_then(|o| is_hybrid(o).ok()),
                    "types": hist,
                })
            })
            .collect();
        json!({
            "theta": self.theta.to_json(),
            "range": [self.range.0, self.range.1],
            "members": members,
        })
    }
}

/// Chains compatible points from `init` (on KS_N) up to level `up_to`, runs
/// every orbit, and checks the segment condition for every pair of levels.
pub fn build_sequence(
    tower: &Tower,
    level: u32,
    init: &InitialCondition,
    up_to: u32,
    max_steps: usize,
) -> Result<CompatibleSequence> {
    if up_to < level {
        return Err(Error::Domain(format!("range {level}..{up_to} is empty")));
    }
    tower.check(up_to)?;
    let p0 = tower.get(level);
    let theta = init.direction.clone();
    let mut members = Vec::new();
    let first = run_orbit(p0, init, max_steps)?;
    members.push(Member { level, initial: Some(init.clone()), status: first.status.clone(), orbit: Some(first) });
    let dir = match &theta {
        Direction::Exact(d) => *d,
        Direction::SymbolicIrrational { .. } => {
            for j in level + 1..=up_to {
                members.push(Member { level: j, initial: None, orbit: None, status: OrbitStatus::DenseByDirection });
            }
            return Ok(CompatibleSequence { theta, range: (level, up_to), members });
        }
    };
    let mut prev = init.point.clone();
    for j in level + 1..=up_to {
        let bp = compatible_point(tower, j - 1, &prev, dir, j)?;
        let ic = InitialCondition::new(tower.get(j), bp.clone(), theta.clone())
            .map_err(|e| Error::NoCompatible { level: j, reason: e.to_string() })?;
        let o = run_orbit(tower.get(j), &ic, max_steps)?;
        members.push(Member { level: j, initial: Some(ic), status: o.status.clone(), orbit: Some(o) });
        prev = bp;
    }
    verify_pairwise(tower, &members)?;
    Ok(CompatibleSequence { theta, range: (level, up_to), members })
}

fn verify_pairwise(tower: &Tower, members: &[Member]) -> Result<()> {
    let pos: Vec<(u32, LatticePoint)> = members
        .iter()
        .filter_map(|m| m.initial.as_ref().map(|ic| (m.level, tower.get(m.level).position(&ic.point))))
        .collect();
    for (i, (m, xm)) in pos.iter().enumerate() {
        for (n, xn) in &pos[i + 1..] {
            if !segment_meets_boundary_only_at(tower.get(*n), xn, xm) {
                return Err(Error::NoCompatible {
                    level: *n,
                    reason: format!("segment from x_{n} to x_{m} meets KS_{n} away from x_{n}"),
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    AllClosed,
    AllDense,
}

/// Rational direction: every member closed. Irrational: every member dense.
/// Anything else is reported as a verification failure.
pub fn dichotomy_check(seq: &CompatibleSequence) -> Result<Dichotomy> {
    match &seq.theta {
        Direction::Exact(_) => {
            if let Some(m) = seq.members.iter().find(|m| !m.status.is_closed()) {
                return Err(Error::Verification(format!(
                    "rational direction but level {} is {}",
                    m.level,
                    m.status.label()
                )));
            }
            Ok(Dichotomy::AllClosed)
        }
        Direction::SymbolicIrrational { .. } => {
            if let Some(m) = seq.members.iter().find(|m| m.status != OrbitStatus::DenseByDirection) {
                return Err(Error::Verification(format!(
                    "irrational direction but level {} is {}",
                    m.level,
                    m.status.label()
                )));
            }
            Ok(Dichotomy::AllDense)
        }
    }
}

/// Seed families with odd `b`: `x = r/4^s` with direction `a·u1 + b·u2`, or
/// `x = r/2^s` with `a = 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyCase {
    IntegerA { a: u64, b: u64 },
    HalfA { b: u64 },
}

impl FamilyCase {
    pub fn direction(self) -> LatticeDir {
        match self {
            FamilyCase::IntegerA { a, b } => LatticeDir::new(a as i64, b as i64).unwrap(),
            FamilyCase::HalfA { b } => LatticeDir::new(1, 2 * b as i64).unwrap(),
        }
    }

    /// Denominator base of the seed: 4 for integer `a`, 2 for `a = 1/2`.
    pub fn radix(self) -> u64 {
        match self {
            FamilyCase::IntegerA { .. } => 4,
            FamilyCase::HalfA { .. } => 2,
        }
    }

    /// Valid numerators `r` for exponent `s`.
    pub fn numerators(self, s: u32) -> impl Iterator<Item = u64> {
        (1..self.radix().pow(s)).step_by(2)
    }
}

pub fn family_seed(p0: &Prefractal, case: FamilyCase, r: u64, s: u32) -> Result<InitialCondition> {
    if p0.level() != 0 {
        return Err(Error::Domain("seeds live on KS_0".into()));
    }
    let bad = |m: &str| Err(Error::Domain(m.to_string()));
    match case {
        FamilyCase::IntegerA { a, b } => {
            if a == 0 {
                return bad("a must be a positive integer");
            }
            if b == 0 || b % 2 == 0 {
                return bad("b must be a positive odd integer");
            }
        }
        FamilyCase::HalfA { b } => {
            if b == 0 || b % 2 == 0 {
                return bad("b must be a positive odd integer");
            }
        }
    }
    if s == 0 {
        return bad("s must be at least 1");
    }
    let q = case.radix().checked_pow(s).ok_or_else(|| Error::Domain("s too large".into()))?;
    if r == 0 || r >= q || r.is_multiple_of(2) {
        return bad("r must be odd with 1 <= r < radix^s");
    }
    let t = Rational::new((r as i64).into(), (q as i64).into());
    InitialCondition::new(p0, BoundaryPoint::new(0, t), Direction::Exact(case.direction()))
}

/// First scale-`k` lattice point (`k <= k_max`) on the ray from `(x0, 0)`
/// in direction `d`, scanning lattice rows `0 <= beta <= rows`.
pub fn lattice_collision_witness(x0: &Rational, d: LatticeDir, k_max: u32, rows: u32) -> Option<(u32, LatticePoint)> {
    if d.b <= 0 {
        return None;
    }
    let r = x0.numer().to_i128()?;
    let q = x0.denom().to_i128()?;
    let (da, db) = (d.a as i128, d.b as i128);
    for k in 1..=k_max {
        let sk = 3i128.pow(k);
        // alpha * 3^k = r*3^k/q + j*da/db must be an integer at beta = j/3^k.
        let modulus = q * db;
        for j in 0..=(rows as i128 * sk) {
            if (r * sk * db + j * da * q) % modulus == 0 {
                let alpha = x0 + Rational::new(((j * da) as i64).into(), ((sk * db) as i64).into());
                let beta = Rational::new((j as i64).into(), (sk as i64).into());
                return Some((k, LatticePoint::new(alpha, beta)));
            }
        }
    }
    None
}

/// Finite check that the unfolded line of a seed avoids every scale-`k`
/// lattice point, `k <= k_max`, over a window of `rows` lattice rows.
pub fn lattice_avoidance_check(init: &InitialCondition, k_max: u32, rows: u32) -> Result<bool> {
    let d = init.direction.as_exact().ok_or_else(|| Error::Domain("avoidance needs a rational direction".into()))?;
    if init.point.side != 0 {
        return Err(Error::Domain("seed must lie on the base".into()));
    }
    Ok(lattice_collision_witness(&init.point.t, d, k_max, rows).is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constancy {
    StabilizesAt(u32),
    NotConstant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantReport {
    pub verdict: Constancy,
    /// Every footprint type of the first member is `[lr,c]`.
    pub hypothesis: bool,
    /// Longest preperiod up to and including its last `c`, over the first
    /// member's footprint.
    pub max_c_prefix: usize,
}

/// Least level from which all members share one footprint, compared as
/// sets of planar points. A lone stable last member only counts when the
/// sequence has a single member.
pub fn detect_constant(tower: &Tower, seq: &CompatibleSequence) -> Result<ConstantReport> {
    let mut sets = Vec::new();
    for m in &seq.members {
        let o = match (&m.orbit, &m.status) {
            (Some(o), OrbitStatus::Periodic { .. }) => o,
            _ => return Err(Error::Domain(format!("level {} is not periodic", m.level))),
        };
        let p = tower.get(m.level);
        let pts: BTreeSet<LatticePoint> = o.footprint.iter().map(|s| p.position(&s.point)).collect();
        sets.push((m.level, pts));
    }
    let first = seq.members.first().and_then(|m| m.orbit.as_ref());
    let (hypothesis, max_c_prefix) = match first {
        Some(o) => {
            let hyp = !o.footprint.is_empty() && footprint_types(o).into_iter().all(is_stabilizing_type);
            let cp = o
                .footprint
                .iter()
                .filter_map(|s| expand(&s.point.t).ok())
                .map(|e| e.preperiod.iter().rposition(|&d| d == 1).map_or(0, |i| i + 1))
                .max()
                .unwrap_or(0);
            (hyp, cp)
        }
        None => (false, 0),
    };
    let verdict = match sets.len() {
        0 => Constancy::NotConstant,
        1 => Constancy::StabilizesAt(sets[0].0),
        n => {
            let last = &sets[n - 1].1;
            let mut start = n - 1;
            while start > 0 && sets[start - 1].1 == *last {
                start -= 1;
            }
            if start == n - 1 {
                Constancy::NotConstant
            } else {
                Constancy::StabilizesAt(sets[start].0)
            }
        }
    };
    Ok(ConstantReport { verdict, hypothesis, max_c_prefix })
}

/// Seed of the hook family: the point `3/4` read from the far end of the
/// base, i.e. `t = 1/4` counterclockwise, launched at `π/6`.
pub fn hook_seed(p0: &Prefractal) -> Result<InitialCondition> {
    InitialCondition::new(p0, BoundaryPoint::new(0, rat(1, 4)), Direction::Exact(LatticeDir { a: 1, b: 1 }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HookLevel {
    pub level: u32,
    pub period: Option<usize>,
    pub degenerate: bool,
    /// Seed basepoint unchanged from level 0.
    pub same_seed: bool,
    pub second_type: Option<TernaryType>,
    pub second_is_cantor: bool,
    /// Type of the basepoint two bounces after the seed.
    pub third_type: Option<TernaryType>,
    /// Basepoints where the ball is sent straight back, with their types.
    pub perpendicular_feet: Vec<(BoundaryPoint, TernaryType)>,
    /// First perpendicular foot in dynamical order.
    pub hook_foot: Option<LatticePoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HookTrace {
    pub sequence: CompatibleSequence,
    pub levels: Vec<HookLevel>,
    /// Distances between hook feet of consecutive levels.
    pub foot_gaps: Vec<f64>,
}

/// `[c, ⊆lr]`: the type the hook description assigns to perpendicular feet.
pub fn is_c_lr_type(ty: TernaryType) -> bool {
    ty.infinite == CharSet::C && ty.finite.is_subset(CharSet::LR)
}

pub fn hook_trace(tower: &Tower, max_level: u32, max_steps: usize) -> Result<HookTrace> {
    let p0 = tower.get(0);
    let seed = hook_seed(p0)?;
    let seq = build_sequence(tower, 0, &seed, max_level, max_steps)?;
    let seed_pos = p0.position(&seed.point);
    let mut levels = Vec::new();
    for m in &seq.members {
        let p = tower.get(m.level);
        let o = m.orbit.as_ref().expect("rational sequences carry orbits");
        let types = footprint_types(o);
        let n = o.footprint.len();
        let closed = o.period().is_some();
        let mut feet = Vec::new();
        for (i, (s, ty)) in o.footprint.iter().zip(&types).enumerate() {
            if i == 0 && !closed {
                continue;
            }
            let incoming = o.footprint[(i + n - 1) % n].dir;
            if s.dir == incoming.reversed() {
                feet.push((s.point.clone(), *ty));
            }
        }
        let hook_foot = feet.first().map(|(bp, _)| p.position(bp));
        levels.push(HookLevel {
            level: m.level,
            period: o.period(),
            degenerate: o.is_degenerate(),
            same_seed: p.position(&o.footprint[0].point) == seed_pos,
            second_type: types.get(1).copied(),
            second_is_cantor: types.get(1).is_some_and(|&t| is_cantor_point_type(t)),
            third_type: types.get(2).copied(),
            perpendicular_feet: feet,
            hook_foot,
        });
    }
    let foot_gaps = levels
        .windows(2)
        .filter_map(|w| match (&w[0].hook_foot, &w[1].hook_foot) {
            (Some(a), Some(b)) => Some(distance(a, b)),
            _ => None,
        })
        .collect();
    Ok(HookTrace { sequence: seq, levels, foot_gaps })
}

pub fn distance(a: &LatticePoint, b: &LatticePoint) -> f64 {
    rational_to_f64(&(a - b).norm2()).sqrt()
}

/// Every footprint type of a member, with its side-local parameter, for
/// reporting.
pub fn member_types(m: &Member) -> Vec<(BoundaryPoint, TernaryType)> {
    m.orbit
        .as_ref()
        .map(|o| o.footprint.iter().map(|s| (s.point.clone(), classify(&s.point.t).unwrap())).collect())
        .unwrap_or_default()
}

/// All seeds of both families for the given `a`, `b` values and exponents
/// `1..=s_max`.
pub fn family_grid(values: &[u64], s_max: u32) -> Vec<(FamilyCase, u64, u32)> {
    let mut out = Vec::new();
    for &a in values {
        for &b in values {
            for s in 1..=s_max {
                let case = FamilyCase::IntegerA { a, b };
                out.extend(case.numerators(s).map(|r| (case, r, s)));
            }
        }
    }
    for &b in values {
        for s in 1..=s_max {
            let case = FamilyCase::HalfA { b };
            out.extend(case.numerators(s).map(|r| (case, r, s)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub case: FamilyCase,
    pub r: u64,
    pub s: u32,
    pub initial: Option<InitialCondition>,
    /// `(level, status label, hybrid)` per member.
    pub members: Vec<(u32, &'static str, Option<bool>)>,
    pub dichotomy: Option<Dichotomy>,
    pub avoidance: Option<bool>,
    pub error: Option<String>,
}

impl SweepRow {
    /// Every member periodic and hybrid.
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && !self.members.is_empty()
            && self.members.iter().all(|(_, st, h)| *st == "Periodic" && *h == Some(true))
    }

    pub fn first_failure(&self) -> Option<u32> {
        self.members.iter().find(|(_, st, h)| *st != "Periodic" || *h != Some(true)).map(|m| m.0)
    }

    pub fn to_json(&self) -> Value {
        let (kind, a, b) = match self.case {
            FamilyCase::IntegerA { a, b } => (1, json!(a), b),
            FamilyCase::HalfA { b } => (2, json!("1/2"), b),
        };
        json!({
            "case": kind,
            "a": a,
            "b": b,
            "r": self.r,
            "s": self.s,
            "initial": self.initial.as_ref().map(InitialCondition::to_json),
            "members": self.members.iter().map(|(l, st, h)| json!({"level": l, "status": st, "hybrid": h})).collect::<Vec<_>>(),
            "dichotomy": self.dichotomy.map(|d| format!("{d:?}")),
            "lattice_avoidance": self.avoidance,
            "passed": self.passed(),
            "error": self.error,
        })
    }
}

fn sweep_one(tower: &Tower, case: FamilyCase, r: u64, s: u32, up_to: u32, max_steps: usize, k_max: u32) -> SweepRow {
    let mut row =
        SweepRow { case, r, s, initial: None, members: Vec::new(), dichotomy: None, avoidance: None, error: None };
    let init = match family_seed(tower.get(0), case, r, s) {
        Ok(i) => i,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.avoidance = lattice_avoidance_check(&init, k_max, 12).ok();
    row.initial = Some(init.clone());
    match build_sequence(tower, 0, &init, up_to, max_steps) {
        Ok(seq) => {
            row.members = seq
                .members
                .iter()
                .map(|m| (m.level, m.status.label(), m.orbit.as_ref().and_then(|o| is_hybrid(o).ok())))
                .collect();
            match dichotomy_check(&seq) {
                Ok(d) => row.dichotomy = Some(d),
                Err(e) => row.error = Some(e.to_string()),
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every seed over levels `0..=up_to` on `threads` workers. Rows come
/// back in input order.
pub fn family_sweep(
    tower: &Tower,
    seeds: &[(FamilyCase, u64, u32)],
    up_to: u32,
    max_steps: usize,
    threads: usize,
) -> Vec<SweepRow> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; seeds.len()]);
    std::thread::scope(|sc| {
        for _ in 0..threads.max(1) {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(case, r, s)) = seeds.get(i) else { break };
                let row = sweep_one(tower, case, r, s, up_to, max_steps, up_to.max(1));
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    rows.into_inner().unwrap().into_iter().map(|r| r.expect("every seed is processed")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::LatticeVector;

    fn seed(p: &Prefractal, t: Rational, a: i64, b: i64) -> InitialCondition {
        InitialCondition::new(p, BoundaryPoint::new(0, t), Direction::exact(a, b).unwrap()).unwrap()
    }

    #[test]
    fn seven_twelfths_compatible_point() {
        let tower = Tower::new(1).unwrap();
        let bp = compatible_point(&tower, 0, &BoundaryPoint::new(0, rat(7, 12)), LatticeDir { a: 0, b: 1 }, 1).unwrap();
        let x = tower.get(1).position(&bp);
        assert_eq!(x, LatticeVector::new(rat(7, 12), rat(-1, 4)));
        assert_eq!(bp.t, rat(3, 4));
        assert_eq!(classify(&bp.t).unwrap().to_string(), "[lr,∅]");
    }

    #[test]
    fn surviving_point_is_kept() {
        let tower = Tower::new(1).unwrap();
        let bp = compatible_point(&tower, 0, &BoundaryPoint::new(0, rat(1, 4)), LatticeDir { a: 1, b: 1 }, 1).unwrap();
        assert_eq!(tower.get(1).position(&bp), LatticeVector::new(rat(1, 4), int(0)));
    }

    #[test]
    fn backward_ray_into_a_corner() {
        let tower = Tower::new(1).unwrap();
        // Backward from (1/2, 0) along (1,-2) lands on the bump apex (2/3, -1/3).
        let r = compatible_point(&tower, 0, &BoundaryPoint::new(0, rat(1, 2)), LatticeDir { a: -1, b: 2 }, 1);
        assert!(matches!(r, Err(Error::NoCompatible { level: 1, .. })));
    }

    #[test]
    fn single_member_sequence() {
        let tower = Tower::new(0).unwrap();
        let s = build_sequence(&tower, 0, &seed(tower.get(0), rat(7, 12), 0, 1), 0, 100).unwrap();
        assert_eq!(s.members.len(), 1);
        assert_eq!(detect_constant(&tower, &s).unwrap().verdict, Constancy::StabilizesAt(0));
    }

    #[test]
    fn seven_twelfths_is_eventually_constant() {
        let tower = Tower::new(3).unwrap();
        let s = build_sequence(&tower, 0, &seed(tower.get(0), rat(7, 12), 0, 1), 3, 10_000).unwrap();
        let r = detect_constant(&tower, &s).unwrap();
        assert_eq!(r.verdict, Constancy::StabilizesAt(1));
        assert!(r.hypothesis);
        assert_eq!(r.max_c_prefix, 1);
        assert_eq!(dichotomy_check(&s).unwrap(), Dichotomy::AllClosed);
    }

    #[test]
    fn irrational_sequences_are_dense() {
        let tower = Tower::new(2).unwrap();
        let d = Direction::SymbolicIrrational { tag: "golden".into(), angle: 1.0 };
        let init = InitialCondition::new(tower.get(0), BoundaryPoint::new(0, rat(1, 2)), d).unwrap();
        let s = build_sequence(&tower, 0, &init, 2, 10).unwrap();
        assert_eq!(dichotomy_check(&s).unwrap(), Dichotomy::AllDense);
    }

    #[test]
    fn mixed_statuses_fail_verification() {
        let tower = Tower::new(1).unwrap();
        let mut s = build_sequence(&tower, 0, &seed(tower.get(0), rat(7, 12), 0, 1), 1, 100).unwrap();
        s.members[1].status = OrbitStatus::Truncated { steps: 1 };
        assert!(matches!(dichotomy_check(&s), Err(Error::Verification(_))));
    }

    #[test]
    fn family_seeds() {
        let p0 = crate::prefractal::build_prefractal(0).unwrap();
        let i = family_seed(&p0, FamilyCase::IntegerA { a: 1, b: 1 }, 1, 1).unwrap();
        assert_eq!(i.point.t, rat(1, 4));
        assert_eq!(i.direction, Direction::exact(1, 1).unwrap());
        let i = family_seed(&p0, FamilyCase::HalfA { b: 1 }, 1, 1).unwrap();
        assert_eq!(i.point.t, rat(1, 2));
        assert_eq!(i.direction, Direction::exact(1, 2).unwrap());
        assert!(family_seed(&p0, FamilyCase::IntegerA { a: 1, b: 2 }, 1, 1).is_err());
        assert!(family_seed(&p0, FamilyCase::IntegerA { a: 1, b: 1 }, 2, 1).is_err());
        assert!(family_seed(&p0, FamilyCase::HalfA { b: 1 }, 2, 1).is_err());
    }

    #[test]
    fn avoidance() {
        let p0 = crate::prefractal::build_prefractal(0).unwrap();
        let i = family_seed(&p0, FamilyCase::IntegerA { a: 1, b: 1 }, 1, 1).unwrap();
        assert!(lattice_avoidance_check(&i, 3, 12).unwrap());
        for r in [1, 3] {
            let i = family_seed(&p0, FamilyCase::HalfA { b: 1 }, r, 2).unwrap();
            assert!(lattice_avoidance_check(&i, 3, 12).unwrap());
        }
        // With s = 1 the parity argument has no factor of two to spare.
        let i = family_seed(&p0, FamilyCase::HalfA { b: 1 }, 1, 1).unwrap();
        assert!(!lattice_avoidance_check(&i, 3, 12).unwrap());
        let (k, x) = lattice_collision_witness(&rat(1, 2), LatticeDir { a: 1, b: 2 }, 3, 12).unwrap();
        assert_eq!((k, x), (1, LatticeVector::new(rat(2, 3), rat(1, 3))));
        let w = lattice_collision_witness(&rat(1, 6), LatticeDir { a: 1, b: 2 }, 3, 12).unwrap();
        assert_eq!(w, (1, LatticeVector::new(rat(1, 3), rat(1, 3))));
    }
}
