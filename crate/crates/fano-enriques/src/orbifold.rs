//! Terminal cyclic quotient singularities `1/r(1,a,-a)`.
//!
//! Canonical forms, the orbifold Riemann–Roch contributions `c_Q`, and the
//! transfer of singularities between a cyclic cover and its quotient.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact::{gcd, int, md, mod_inverse, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbifoldError {
    #[error("invalid singularity index {0}")]
    InvalidIndex(i64),
    #[error("1/{r}(1,{a},{b}) is not a terminal cyclic quotient: gcd(a, r) must be 1", b = r - a)]
    InvalidWeight { r: i64, a: i64 },
    #[error("1/{r}({x},{y},{z}) is not of terminal form 1/r(1,a,-a)")]
    NotTerminal { r: i64, x: i64, y: i64, z: i64 },
    #[error("marking l={l} on {ty} has local order {alpha}, which does not divide r={r}")]
    InconsistentMarking {
        ty: SingularityType,
        l: i64,
        alpha: i64,
        r: i64,
    },
    #[error("local coefficient l={l} out of range for {ty}")]
    InvalidMarking { ty: SingularityType, l: i64 },
    #[error("cannot parse singularity from {0:?}")]
    Parse(String),
}

/// A terminal point `1/r(1,a,r-a)` with canonical `a <= r/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SingularityType {
    r: i64,
    a: i64,
}

impl SingularityType {
    /// Accepts any `a` coprime to `r`; it is replaced by `min(a, r-a)`.
    pub fn new(r: i64, a: i64) -> Result<Self, OrbifoldError> {
        if r < 2 {
            return Err(OrbifoldError::InvalidIndex(r));
        }
        let a = md(a, r);
        if a == 0 || gcd(a, r) != 1 {
            return Err(OrbifoldError::InvalidWeight { r, a });
        }
        Ok(SingularityType { r, a: a.min(r - a) })
    }

    pub fn half(r: i64) -> Self {
        SingularityType::new(r, 1).expect("1/r(1,1,-1) is always terminal for r >= 2")
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn exponents(&self) -> [i64; 3] {
        [1, self.a, self.r - self.a]
    }

    /// `b` with `a*b = 1 mod r`.
    pub fn inverse_weight(&self) -> i64 {
        mod_inverse(self.a, self.r).expect("canonical weight is a unit")
    }

    pub fn marked(self, l: i64) -> Result<MarkedSingularity, OrbifoldError> {
        MarkedSingularity::new(self, l)
    }
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}(1,{},{})", self.r, self.a, self.r - self.a)
    }
}

impl FromStr for SingularityType {
    type Err = OrbifoldError;

    /// Parses `1/r(x,y,z)`, normalizing any terminal exponent triple.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || OrbifoldError::Parse(s.to_string());
        let t = s.trim();
        let rest = t.strip_prefix("1/").ok_or_else(err)?;
        let (r, rest) = rest.split_once('(').ok_or_else(err)?;
        let inner = rest.strip_suffix(')').ok_or_else(err)?;
        let r: i64 = r.trim().parse().map_err(|_| err())?;
        let xs: Vec<i64> = inner
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        if xs.len() != 3 {
            return Err(err());
        }
        match normalize_type(r, [xs[0], xs[1], xs[2]])? {
            Fiber::Singular(t) => Ok(t),
            Fiber::Smooth => Err(err()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    r: i64,
    a: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    l: Option<i64>,
}

/// Either `{"r", "a", "l"}` or the printed form such as `1/5(1,2,3)_2`.
#[derive(Deserialize)]
#[serde(untagged)]
enum PointInput {
    Fields(RawPoint),
    Text(String),
}

impl Serialize for SingularityType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawPoint {
            r: self.r,
            a: self.a,
            l: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SingularityType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PointInput::deserialize(d)? {
            PointInput::Fields(raw) => {
                SingularityType::new(raw.r, raw.a).map_err(serde::de::Error::custom)
            }
            PointInput::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Result of reducing an action: either a smooth point or a terminal type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fiber {
    Smooth,
    Singular(SingularityType),
}

impl Fiber {
    pub fn index(&self) -> i64 {
        match self {
            Fiber::Smooth => 1,
            Fiber::Singular(t) => t.r,
        }
    }

    pub fn singular(&self) -> Option<SingularityType> {
        match self {
            Fiber::Smooth => None,
            Fiber::Singular(t) => Some(*t),
        }
    }
}

impl fmt::Display for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fiber::Smooth => write!(f, "smooth"),
            Fiber::Singular(t) => t.fmt(f),
        }
    }
}

/// A singularity with the local coefficient `l` of the torsion divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedSingularity {
    ty: SingularityType,
    l: i64,
}

impl MarkedSingularity {
    pub fn new(ty: SingularityType, l: i64) -> Result<Self, OrbifoldError> {
        if !(0..ty.r).contains(&l) {
            return Err(OrbifoldError::InvalidMarking { ty, l });
        }
        Ok(MarkedSingularity { ty, l })
    }

    pub fn ty(&self) -> SingularityType {
        self.ty
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    /// `d = gcd(r_Q, l_Q)`.
    pub fn d(&self) -> i64 {
        gcd(self.ty.r, self.l)
    }

    /// Order of the torsion class in the local class group, `r_Q / d`.
    pub fn alpha(&self) -> i64 {
        self.ty.r / self.d()
    }

    /// The same point with `l` replaced by `[u l]_{r_Q}`.
    pub fn rescaled(&self, u: i64) -> MarkedSingularity {
        MarkedSingularity {
            ty: self.ty,
            l: md(u * self.l, self.ty.r),
        }
    }
}

impl fmt::Display for MarkedSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.ty, self.l)
    }
}

impl FromStr for MarkedSingularity {
    type Err = OrbifoldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || OrbifoldError::Parse(s.to_string());
        let (ty, l) = s.trim().rsplit_once('_').ok_or_else(err)?;
        let l: i64 = l.parse().map_err(|_| err())?;
        MarkedSingularity::new(ty.parse()?, l)
    }
}

impl Serialize for MarkedSingularity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawPoint {
            r: self.ty.r,
            a: self.ty.a,
            l: Some(self.l),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedSingularity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = match PointInput::deserialize(d)? {
            PointInput::Fields(raw) => raw,
            PointInput::Text(t) => return t.parse().map_err(D::Error::custom),
        };
        let l = raw
            .l
            .ok_or_else(|| D::Error::custom("marked singularity needs field l"))?;
        let ty = SingularityType::new(raw.r, raw.a).map_err(D::Error::custom)?;
        MarkedSingularity::new(ty, l).map_err(D::Error::custom)
    }
}

/// A multiset kept as sorted `(item, multiplicity)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basket<T> {
    entries: Vec<(T, usize)>,
}

pub type TypeBasket = Basket<SingularityType>;
pub type MarkedBasket = Basket<MarkedSingularity>;

impl<T: Ord + Clone> Default for Basket<T> {
    fn default() -> Self {
        Basket {
            entries: Vec::new(),
        }
    }
}

impl<T: Ord + Clone> Basket<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_items<I: IntoIterator<Item = T>>(items: I) -> Self {
        let mut v: Vec<T> = items.into_iter().collect();
        v.sort();
        let mut entries: Vec<(T, usize)> = Vec::new();
        for x in v {
            match entries.last_mut() {
                Some((y, m)) if *y == x => *m += 1,
                _ => entries.push((x, 1)),
            }
        }
        Basket { entries }
    }

    pub fn add(&mut self, item: T, count: usize) {
        if count == 0 {
            return;
        }
        match self.entries.binary_search_by(|(y, _)| y.cmp(&item)) {
            Ok(k) => self.entries[k].1 += count,
            Err(k) => self.entries.insert(k, (item, count)),
        }
    }

    pub fn entries(&self) -> &[(T, usize)] {
        &self.entries
    }

    /// Items with repetition, in canonical order.
    pub fn items(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries
            .iter()
            .flat_map(|(x, m)| std::iter::repeat_n(x, *m))
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.items().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn multiplicity(&self, item: &T) -> usize {
        match self.entries.binary_search_by(|(y, _)| y.cmp(item)) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0,
        }
    }

    pub fn contains_all(&self, other: &Basket<T>) -> bool {
        other
            .entries
            .iter()
            .all(|(x, m)| self.multiplicity(x) >= *m)
    }

    /// `self - other` as multisets, or `None` if `other` is not contained.
    pub fn difference(&self, other: &Basket<T>) -> Option<Basket<T>> {
        if !self.contains_all(other) {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|(x, m)| {
                let left = m - other.multiplicity(x);
                (left > 0).then(|| (x.clone(), left))
            })
            .collect();
        Some(Basket { entries })
    }

    pub fn union(&self, other: &Basket<T>) -> Basket<T> {
        let mut out = self.clone();
        for (x, m) in &other.entries {
            out.add(x.clone(), *m);
        }
        out
    }
}

impl<T: Ord + Clone> FromIterator<T> for Basket<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Basket::from_items(iter)
    }
}

impl<T: fmt::Display> fmt::Display for Basket<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "-");
        }
        for (k, (x, m)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            if *m > 1 {
                write!(f, "{x} x{m}")?;
            } else {
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl<T: Serialize> Serialize for Basket<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let n = self.entries.iter().map(|(_, m)| m).sum();
        let mut seq = s.serialize_seq(Some(n))?;
        for (x, m) in &self.entries {
            for _ in 0..*m {
                seq.serialize_element(x)?;
            }
        }
        seq.end()
    }
}

impl<'de, T: Deserialize<'de> + Ord + Clone> Deserialize<'de> for Basket<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Basket::from_items(Vec::<T>::deserialize(d)?))
    }
}

impl MarkedBasket {
    pub fn unmarked(&self) -> TypeBasket {
        self.items().map(|m| m.ty).collect()
    }

    pub fn rescaled(&self, u: i64) -> MarkedBasket {
        self.items().map(|m| m.rescaled(u)).collect()
    }
}

/// Canonical form of the action `1/r(x,y,z)`.
///
/// The triple is first divided by `gcd(r,x,y,z)`; a resulting index of 1
/// gives [`Fiber::Smooth`].
pub fn normalize_type(r: i64, exponents: [i64; 3]) -> Result<Fiber, OrbifoldError> {
    if r < 1 {
        return Err(OrbifoldError::InvalidIndex(r));
    }
    let g = exponents.iter().fold(r, |g, &x| gcd(g, x));
    let r1 = r / g;
    if r1 == 1 {
        return Ok(Fiber::Smooth);
    }
    let t = exponents.map(|x| md(x / g, r1));
    for u in 1..r1 {
        if gcd(u, r1) != 1 {
            continue;
        }
        let s = t.map(|x| md(u * x, r1));
        for p in 0..3 {
            if s[p] != 1 {
                continue;
            }
            let (o0, o1) = (s[(p + 1) % 3], s[(p + 2) % 3]);
            if md(o0 + o1, r1) == 0 && gcd(o0, r1) == 1 {
                return Ok(Fiber::Singular(SingularityType {
                    r: r1,
                    a: o0.min(o1),
                }));
            }
        }
    }
    let [x, y, z] = exponents;
    Err(OrbifoldError::NotTerminal { r, x, y, z })
}

fn f_term(r: i64, b: i64, j: i64) -> Rational {
    let x = md(b * j, r);
    rat(x * (r - x), 2 * r)
}

/// The orbifold Riemann–Roch correction `c_Q` of a divisor that is
/// locally `i K`; `i` is reduced modulo `r` first.
pub fn contribution_cq(s: SingularityType, i: i64) -> Rational {
    let r = s.r;
    let b = s.inverse_weight();
    let iq = md(i, r);
    let mut total = rat(-iq * (r * r - 1), 12 * r);
    for j in 1..iq {
        total += f_term(r, b, j);
    }
    total
}

/// `sum (r_Q - 1/r_Q)` over the basket, with multiplicity.
pub fn terminal_sum(basket: &TypeBasket) -> Rational {
    basket
        .entries()
        .iter()
        .fold(Rational::zero(), |acc, (t, m)| {
            acc + (int(t.r) - rat(1, t.r)) * int(*m as i64)
        })
}

/// The point of index `beta*d` obtained by letting `Z/beta` act with local
/// exponents `(x,y,z)` on a point of index `d` (smooth meaning `d = 1`).
pub fn compose_actions(
    beta: i64,
    exponents: [i64; 3],
    point: Fiber,
) -> Result<Fiber, OrbifoldError> {
    if beta < 2 {
        return Err(OrbifoldError::InvalidIndex(beta));
    }
    let (d, p) = match point {
        Fiber::Smooth => (1, [1, 1, 1]),
        Fiber::Singular(t) => (t.r, t.exponents()),
    };
    let [x, y, z] = exponents;
    normalize_type(
        beta * d,
        [
            x * d + p[0] * beta,
            y * d + p[1] * beta,
            z * d + p[2] * beta,
        ],
    )
}

/// Points of the `Z/r` cover over a marked point: `(count, fiber type)`.
pub fn preimage_singularity(m: MarkedSingularity, r: i64) -> Result<(i64, Fiber), OrbifoldError> {
    let d = m.d();
    let alpha = m.alpha();
    if r < 1 || r % alpha != 0 {
        return Err(OrbifoldError::InconsistentMarking {
            ty: m.ty,
            l: m.l,
            alpha,
            r,
        });
    }
    let a = m.ty.a;
    let fiber = normalize_type(d, [1, md(a, d), md(m.ty.r - a, d)])?;
    Ok((r / alpha, fiber))
}
