//! Exact rationals and modular residues.
//!
//! Everything numeric in the crate goes through [`Rational`], an
//! arbitrary-precision fraction kept in lowest terms, so equality is
//! structural and parity checks never see rounding.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("invalid modulus {0}: must be at least 1")]
    InvalidModulus(i64),
    #[error("{a} has no inverse modulo {r}")]
    NoInverse { a: i64, r: i64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Minimal nonnegative representative of `a` modulo `r`.
pub fn residue(a: i64, r: i64) -> Result<i64, ExactError> {
    if r < 1 {
        return Err(ExactError::InvalidModulus(r));
    }
    Ok(a.rem_euclid(r))
}

/// Unchecked variant for call sites where `r >= 1` is an invariant.
#[inline]
pub(crate) fn md(a: i64, r: i64) -> i64 {
    debug_assert!(r >= 1);
    a.rem_euclid(r)
}

/// The inverse of `a` modulo `r`, in `[1, r)` (or 0 when `r = 1`).
pub fn mod_inverse(a: i64, r: i64) -> Result<i64, ExactError> {
    if r < 1 {
        return Err(ExactError::InvalidModulus(r));
    }
    let a = md(a, r);
    let g = a.extended_gcd(&r);
    if g.gcd != 1 {
        return Err(ExactError::NoInverse { a, r });
    }
    Ok(md(g.x, r))
}

/// A residue class `value mod modulus` with `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: i64,
    modulus: i64,
}

impl Residue {
    pub fn new(a: i64, modulus: i64) -> Result<Self, ExactError> {
        Ok(Residue {
            value: residue(a, modulus)?,
            modulus,
        })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn plus(self, other: i64) -> Self {
        Residue {
            value: md(self.value + other, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn times(self, other: i64) -> Self {
        Residue {
            value: md(self.value * md(other, self.modulus), self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inverse(self) -> Result<Self, ExactError> {
        Ok(Residue {
            value: mod_inverse(self.value, self.modulus)?,
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.value, self.modulus)
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational, ExactError> {
    if b.is_zero() {
        return Err(ExactError::DivisionByZero);
    }
    Ok(a / b)
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// True when `x` is an integer divisible by 2.
pub fn is_even_integer(x: &Rational) -> bool {
    is_integer(x) && x.numer().is_even()
}

/// Small integer value of a rational, if it is one.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if !is_integer(x) {
        return None;
    }
    i64::try_from(x.numer()).ok()
}

/// Formats as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let err = || ExactError::Parse(s.to_string());
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| err())?;
    let q = BigInt::from_str(q).map_err(|_| err())?;
    if q.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(p, q))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
pub mod rational_string {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Same as [`rational_string`] for nested sequences.
pub mod rational_grid {
    use super::*;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(grid: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(grid.len()))?;
        for row in grid {
            let row: Vec<String> = row.iter().map(format_rational).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        raw.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => {
                            parse_rational(&s).map_err(D::Error::custom)
                        }
                        serde_json::Value::Number(n) => n
                            .as_i64()
                            .map(int)
                            .ok_or_else(|| D::Error::custom(format!("non-integer number {n}"))),
                        other => Err(D::Error::custom(format!("expected rational, got {other}"))),
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues() {
        assert_eq!(residue(21, 10), Ok(1));
        assert_eq!(residue(-3, 5), Ok(2));
        assert_eq!(residue(7 * 4, 10), Ok(8));
        assert_eq!(residue(4, 0), Err(ExactError::InvalidModulus(0)));
        assert_eq!(residue(4, -3), Err(ExactError::InvalidModulus(-3)));
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(3, 10), Ok(7));
        assert_eq!(mod_inverse(2, 5), Ok(3));
        for r in 2..30 {
            assert_eq!(mod_inverse(1, r), Ok(1));
        }
        assert_eq!(
            mod_inverse(4, 10),
            Err(ExactError::NoInverse { a: 4, r: 10 })
        );
        assert_eq!(mod_inverse(-3, 10), Ok(3));
    }

    #[test]
    fn rational_suite() {
        assert_eq!(rat(5, 2) + rat(1, 2), int(3));
        let d = rat(1, 2) - rat(9, 2);
        assert!(is_integer(&d));
        assert_eq!(d, int(-4));
        assert_eq!(rat(33, 10) - rat(35, 10), rat(-1, 5));
        assert_eq!(
            checked_div(&int(1), &int(0)),
            Err(ExactError::DivisionByZero)
        );
        assert!(is_even_integer(&int(-4)));
        assert!(!is_even_integer(&int(3)));
    }

    #[test]
    fn formatting_round_trips() {
        for s in ["-5/2", "3", "0", "1/21"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("4/8").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn residue_type() {
        let x = Residue::new(-7, 5).unwrap();
        assert_eq!(x.value(), 3);
        assert_eq!(x.times(2).value(), 1);
        assert_eq!(x.inverse().unwrap().value(), 2);
        assert_eq!(x.to_string(), "[3]_5");
    }
}
