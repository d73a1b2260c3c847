//! Base-3 addresses of side fractions over the alphabet `{l, c, r}` and the
//! type notation `[infinitely often, finitely often]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{int, Rational};

/// Subset of `{l, c, r}` stored as a 3-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharSet(u8);

impl CharSet {
    pub const EMPTY: CharSet = CharSet(0);
    pub const L: CharSet = CharSet(1);
    pub const C: CharSet = CharSet(2);
    pub const R: CharSet = CharSet(4);
    pub const LR: CharSet = CharSet(5);

    pub fn from_digit(d: u8) -> CharSet {
        CharSet(1 << d)
    }

    pub fn union(self, o: CharSet) -> CharSet {
        CharSet(self.0 | o.0)
    }

    pub fn minus(self, o: CharSet) -> CharSet {
        CharSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: CharSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, o: CharSet) -> bool {
        o.is_subset(self)
    }

    /// Exchanges `l` and `r`.
    pub fn swap_lr(self) -> CharSet {
        CharSet((self.0 & 2) | ((self.0 & 1) << 2) | ((self.0 & 4) >> 2))
    }
}

impl fmt::Display for CharSet {
    /// `c` leads when it is paired with a single side letter (`cl`, `cr`),
    /// otherwise letters appear in `l c r` order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "∅",
            1 => "l",
            2 => "c",
            3 => "cl",
            4 => "r",
            5 => "lr",
            6 => "cr",
            _ => "lcr",
        };
        f.write_str(s)
    }
}

impl FromStr for CharSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "∅" || s.is_empty() {
            return Ok(CharSet::EMPTY);
        }
        s.chars().try_fold(CharSet::EMPTY, |acc, ch| match ch {
            'l' => Ok(acc.union(CharSet::L)),
            'c' => Ok(acc.union(CharSet::C)),
            'r' => Ok(acc.union(CharSet::R)),
            _ => Err(Error::Domain(format!("bad ternary character '{ch}'"))),
        })
    }
}

/// Eventually periodic base-3 digit string: `preperiod` then `period`
/// repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TernaryExpansion {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

const LETTERS: [char; 3] = ['l', 'c', 'r'];

impl TernaryExpansion {
    /// Plain digits with the period in parentheses, e.g. `1(20)`.
    pub fn digits(&self) -> String {
        let d = |v: &[u8]| v.iter().map(|x| char::from(b'0' + x)).collect::<String>();
        format!("{}({})", d(&self.preperiod), d(&self.period))
    }

    /// Sums the base-3 series exactly.
    pub fn value(&self) -> Rational {
        let three = BigInt::from(3);
        let from_digits = |v: &[u8]| BigInt::from_radix_be(Sign::Plus, v, 3).unwrap_or_else(BigInt::zero);
        let pre = from_digits(&self.preperiod);
        let per = from_digits(&self.period);
        let k = self.preperiod.len();
        let l = self.period.len();
        let head = Rational::new(pre, three.pow(k as u32));
        let tail = Rational::new(per, three.pow(l as u32) - 1u32);
        head + tail / Rational::from_integer(three.pow(k as u32))
    }

    /// Digit at 0-based position `i`.
    pub fn digit(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn ternary_type(&self) -> TernaryType {
        let set = |v: &[u8]| v.iter().fold(CharSet::EMPTY, |a, &d| a.union(CharSet::from_digit(d)));
        let inf = set(&self.period);
        TernaryType { infinite: inf, finite: set(&self.preperiod).minus(inf) }
    }

    fn normalize(mut self) -> Self {
        // Minimal period.
        let n = self.period.len();
        for l in 1..=n {
            if n.is_multiple_of(l) && (l..n).all(|i| self.period[i] == self.period[i - l]) {
                self.period.truncate(l);
                break;
            }
        }
        // Absorb preperiod digits that merely repeat the period.
        while let Some(&last) = self.preperiod.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
        self
    }
}

impl fmt::Display for TernaryExpansion {
    /// Letters with a combining overline on each repeating character:
    /// `1/3` renders as `lr̄`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.preperiod {
            write!(f, "{}", LETTERS[d as usize])?;
        }
        for &d in &self.period {
            write!(f, "{}\u{0305}", LETTERS[d as usize])?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryType {
    pub infinite: CharSet,
    pub finite: CharSet,
}

impl TernaryType {
    pub fn new(infinite: CharSet, finite: CharSet) -> Self {
        TernaryType { infinite, finite }
    }

    pub fn swap_lr(self) -> Self {
        TernaryType { infinite: self.infinite.swap_lr(), finite: self.finite.swap_lr() }
    }
}

impl fmt::Display for TernaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.infinite, self.finite)
    }
}

impl FromStr for TernaryType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Domain(format!("bad type notation '{s}'")))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::Domain(format!("bad type notation '{s}'")))?;
        Ok(TernaryType { infinite: a.parse()?, finite: b.parse()? })
    }
}

impl Serialize for TernaryType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn check_unit(t: &Rational) -> Result<()> {
    if t.is_negative() || *t > Rational::one() {
        return Err(Error::Domain(format!("t = {t} is outside [0, 1]")));
    }
    Ok(())
}

/// Canonical expansion of `t` in `[0, 1]`. Ternary rationals take the
/// all-`r` tail; `0` is the all-`l` string.
pub fn expand(t: &Rational) -> Result<TernaryExpansion> {
    check_unit(t)?;
    if t.is_zero() {
        return Ok(TernaryExpansion { preperiod: vec![], period: vec![0] });
    }
    let p = t.numer().clone();
    let q = t.denom().clone();
    let three = BigInt::from(3);
    let mut v = 0usize;
    let mut qq = q.clone();
    while (&qq % &three).is_zero() {
        qq /= &three;
        v += 1;
    }
    let exp = if qq.is_one() {
        // t = p / 3^v: finite digits, last one lowered, then r forever.
        let mut digits = vec![0u8; v];
        let mut x = p;
        for d in digits.iter_mut().rev() {
            let (quo, rem) = x.div_rem(&three);
            *d = rem.to_u8().unwrap();
            x = quo;
        }
        // x is 1 only for t = 1.
        if x.is_one() {
            TernaryExpansion { preperiod: vec![], period: vec![2] }
        } else {
            while digits.last() == Some(&0) {
                digits.pop();
            }
            *digits.last_mut().unwrap() -= 1;
            TernaryExpansion { preperiod: digits, period: vec![2] }
        }
    } else {
        match (p.to_u64(), q.to_u64()) {
            (Some(p), Some(q)) if q < (1 << 61) => long_division_u64(p, q, v),
            _ => long_division_big(p, q, v),
        }
    };
    Ok(exp.normalize())
}

fn long_division_u64(p: u64, q: u64, v: usize) -> TernaryExpansion {
    let mut r = p;
    let step = |r: &mut u64| {
        let x = *r * 3;
        *r = x % q;
        (x / q) as u8
    };
    let preperiod: Vec<u8> = (0..v).map(|_| step(&mut r)).collect();
    let anchor = r;
    let mut period = vec![step(&mut r)];
    while r != anchor {
        period.push(step(&mut r));
    }
    TernaryExpansion { preperiod, period }
}

fn long_division_big(p: BigInt, q: BigInt, v: usize) -> TernaryExpansion {
    let mut r = p;
    let step = |r: &mut BigInt| {
        let (d, m) = (&*r * 3u32).div_rem(&q);
        *r = m;
        d.to_u8().unwrap()
    };
    let preperiod: Vec<u8> = (0..v).map(|_| step(&mut r)).collect();
    let anchor = r.clone();
    let mut period = vec![step(&mut r)];
    while r != anchor {
        period.push(step(&mut r));
    }
    TernaryExpansion { preperiod, period }
}

pub fn classify(t: &Rational) -> Result<TernaryType> {
    Ok(expand(t)?.ternary_type())
}

/// Types listed as admissible for hybrid orbits. The second coordinate is
/// an upper bound on the finitely occurring letters.
pub const HYBRID_PATTERNS: [(CharSet, CharSet); 5] = [
    (CharSet::C, CharSet::LR),
    (CharSet(3), CharSet::R),
    (CharSet(6), CharSet::L),
    (CharSet(7), CharSet::EMPTY),
    (CharSet::LR, CharSet::EMPTY),
];

pub fn is_hybrid_admissible(ty: TernaryType) -> bool {
    HYBRID_PATTERNS.iter().any(|&(inf, fin)| ty.infinite == inf && ty.finite.is_subset(fin))
}

/// `[lr,c]`: a middle-third point whose tail avoids `c`.
pub fn is_stabilizing_type(ty: TernaryType) -> bool {
    ty.infinite == CharSet::LR && ty.finite == CharSet::C
}

/// `[lr,∅]`. Points with a one-letter tail and no finite part are the side
/// endpoints, which are corners rather than Cantor-points.
pub fn is_cantor_point_type(ty: TernaryType) -> bool {
    ty.infinite == CharSet::LR && ty.finite.is_empty()
}

/// Address measured from the opposite endpoint of the side.
pub fn mirror(t: &Rational) -> Result<Rational> {
    check_unit(t)?;
    Ok(int(1) - t)
}

/// Whether `t` is `m / 3^k` (a vertex of some finer prefractal).
pub fn is_ternary_rational(t: &Rational) -> bool {
    let mut q = t.denom().clone();
    let three = BigInt::from(3);
    while (&q % &three).is_zero() {
        q /= &three;
    }
    q.is_one()
}
