//! Exact rational scalars and vectors over the triangular-lattice basis
//! `u1 = (1, 0)`, `u2 = (1/2, sqrt(3)/2)`.
//!
//! A [`LatticeVector`] `(alpha, beta)` stands for `alpha * u1 + beta * u2`.
//! Squared lengths, cross products and reflections in this basis are all
//! rational, so every predicate in the crate is decided over Q without
//! ever materializing `sqrt(3)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds `num / den` from machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"7/12"`, `"-3"` or `"1/4"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Canonical `"p/q"` rendering (`"p"` for integers).
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Orientation class of a prefractal side: its direction angle modulo 180°.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideOrientation {
    Deg0,
    Deg60,
    Deg120,
}

impl SideOrientation {
    pub const ALL: [SideOrientation; 3] = [SideOrientation::Deg0, SideOrientation::Deg60, SideOrientation::Deg120];

    /// Orientation of the line spanned by `v`, if it is one of the three
    /// lattice directions.
    pub fn of_vector(v: &LatticeVector) -> Option<Self> {
        if v.is_zero() {
            None
        } else if v.beta.is_zero() {
            Some(SideOrientation::Deg0)
        } else if v.alpha.is_zero() {
            Some(SideOrientation::Deg60)
        } else if (&v.alpha + &v.beta).is_zero() {
            Some(SideOrientation::Deg120)
        } else {
            None
        }
    }

    /// Integer matrix (row-major, acting on `(alpha, beta)`) of the linear
    /// reflection through a line of this orientation.
    pub fn reflection_matrix(self) -> [[i64; 2]; 2] {
        match self {
            SideOrientation::Deg0 => [[1, 1], [0, -1]],
            SideOrientation::Deg60 => [[-1, 0], [1, 1]],
            SideOrientation::Deg120 => [[0, -1], [-1, 0]],
        }
    }
}

/// Sense of a 60° rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// +60° (counterclockwise).
    Ccw,
    /// -60° (clockwise).
    Cw,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub alpha: Rational,
    pub beta: Rational,
}

/// Positions share the representation of displacement vectors.
pub type LatticePoint = LatticeVector;

impl LatticeVector {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        LatticeVector { alpha, beta }
    }

    pub fn from_ints(alpha: i64, beta: i64) -> Self {
        LatticeVector::new(int(alpha), int(beta))
    }

    pub fn zero() -> Self {
        LatticeVector::new(Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        LatticeVector::new(&self.alpha * k, &self.beta * k)
    }

    /// Squared Euclidean length, `alpha^2 + alpha*beta + beta^2`.
    pub fn norm2(&self) -> Rational {
        lattice_dot(self, self)
    }

    /// Cross product in lattice coordinates, `a1*b2 - b1*a2`. The Euclidean
    /// cross product is this value times `sqrt(3)/2`, so signs agree.
    pub fn cross(&self, other: &LatticeVector) -> Rational {
        &self.alpha * &other.beta - &self.beta * &other.alpha
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.alpha), rational_to_f64(&self.beta))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rational(&self.alpha), fmt_rational(&self.beta))
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector::new(&self.alpha + &rhs.alpha, &self.beta + &rhs.beta)
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector::new(&self.alpha - &rhs.alpha, &self.beta - &rhs.beta)
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-&self.alpha, -&self.beta)
    }
}

impl Mul<&Rational> for &LatticeVector {
    type Output = LatticeVector;
    fn mul(self, k: &Rational) -> LatticeVector {
        self.scale(k)
    }
}

/// Euclidean inner product in the skewed basis (`|u1| = |u2| = 1`,
/// `u1 . u2 = 1/2`).
pub fn lattice_dot(v: &LatticeVector, w: &LatticeVector) -> Rational {
    let mixed = &v.alpha * &w.beta + &v.beta * &w.alpha;
    &v.alpha * &w.alpha + &v.beta * &w.beta + mixed / int(2)
}

pub fn rotate60(v: &LatticeVector, rot: Rotation) -> LatticeVector {
    match rot {
        Rotation::Ccw => LatticeVector::new(-&v.beta, &v.alpha + &v.beta),
        Rotation::Cw => LatticeVector::new(&v.alpha + &v.beta, -&v.alpha),
    }
}

/// Law of reflection through a side of the given orientation.
pub fn reflect_direction(v: &LatticeVector, orientation: SideOrientation) -> LatticeVector {
    match orientation {
        SideOrientation::Deg0 => LatticeVector::new(&v.alpha + &v.beta, -&v.beta),
        SideOrientation::Deg60 => LatticeVector::new(-&v.alpha, &v.alpha + &v.beta),
        SideOrientation::Deg120 => LatticeVector::new(-&v.beta, -&v.alpha),
    }
}

/// Cartesian coordinates, for rendering only.
pub fn to_cartesian(v: &LatticeVector) -> (f64, f64) {
    let (a, b) = v.to_f64();
    (a + b / 2.0, b * 3f64.sqrt() / 2.0)
}

/// Exact direction of travel: a primitive integer vector in the lattice basis.
///
/// Scaling by a positive factor does not change a direction, so the stored
/// pair always has `gcd(a, b) = 1`. The sign is kept: `d` and `-d` are
/// opposite directions of travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeDir {
    pub a: i64,
    pub b: i64,
}

impl LatticeDir {
    /// Primitive form of `(a, b)`; `None` for the zero vector.
    pub fn new(a: i64, b: i64) -> Option<Self> {
        if a == 0 && b == 0 {
            return None;
        }
        let g = a.gcd(&b);
        Some(LatticeDir { a: a / g, b: b / g })
    }

    /// Primitive direction of a rational vector (clears denominators).
    pub fn from_vector(v: &LatticeVector) -> Option<Self> {
        if v.is_zero() {
            return None;
        }
        let l = v.alpha.denom().lcm(v.beta.denom());
        let a = (&v.alpha * Rational::from_integer(l.clone())).to_integer();
        let b = (&v.beta * Rational::from_integer(l)).to_integer();
        let g = a.gcd(&b);
        LatticeDir::new((a / &g).to_i64()?, (b / &g).to_i64()?)
    }

    pub fn to_vector(self) -> LatticeVector {
        LatticeVector::from_ints(self.a, self.b)
    }

    pub fn reversed(self) -> Self {
        LatticeDir { a: -self.a, b: -self.b }
    }

    pub fn reflect(self, orientation: SideOrientation) -> Self {
        let m = orientation.reflection_matrix();
        LatticeDir { a: m[0][0] * self.a + m[0][1] * self.b, b: m[1][0] * self.a + m[1][1] * self.b }
    }

    pub fn rotate60(self, rot: Rotation) -> Self {
        match rot {
            Rotation::Ccw => LatticeDir { a: -self.b, b: self.a + self.b },
            Rotation::Cw => LatticeDir { a: self.a + self.b, b: -self.a },
        }
    }

    /// Squared length of the integer representative.
    pub fn norm2(self) -> i64 {
        self.a * self.a + self.a * self.b + self.b * self.b
    }

    /// `cross(v, self)` with `v` rational.
    pub fn cross_from(self, v: &LatticeVector) -> Rational {
        &v.alpha * BigInt::from(self.b) - &v.beta * BigInt::from(self.a)
    }

    /// Angle from the positive x-axis in radians (rendering and labels only).
    pub fn angle(self) -> f64 {
        let (x, y) = to_cartesian(&self.to_vector());
        y.atan2(x)
    }
}

impl fmt::Display for LatticeDir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
