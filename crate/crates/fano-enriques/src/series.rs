//! Truncated power series in `t` over the group ring `Z[e]/(e^r - 1)`.
//!
//! `coeffs[i][n]` is the coefficient of `e^i t^n`. With `r = 1` this is an
//! ordinary truncated series, which is how single-graded Hilbert series
//! are represented too.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact::{format_rational, int, is_integer, rational_grid, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series over Z/{0} and Z/{1} cannot be combined")]
    Incompatible(usize, usize),
    #[error("factor 1 - e^{i} t^0 is not invertible")]
    NonInvertible { i: usize },
    #[error("constant term is not 1 at e^0: {0}")]
    Unnormalized(String),
    #[error("coefficient of e^{i} t^{n} is {value}, expected a nonnegative integer")]
    NotHilbert { i: usize, n: usize, value: String },
    #[error("malformed series: {0}")]
    Malformed(String),
}

/// `(n, i)`: t-degree `n` and e-degree `i` in `Z/r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub n: usize,
    pub i: usize,
}

impl Bidegree {
    pub fn new(n: usize, i: usize) -> Self {
        Bidegree { n, i }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.i)
    }
}

impl Serialize for Bidegree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.n, self.i].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bidegree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [n, i] = <[usize; 2]>::deserialize(d)?;
        Ok(Bidegree { n, i })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BigradedSeries {
    r: usize,
    trunc: usize,
    #[serde(with = "rational_grid")]
    coeffs: Vec<Vec<Rational>>,
}

#[derive(Deserialize)]
struct RawSeries {
    r: usize,
    trunc: usize,
    #[serde(with = "rational_grid")]
    coeffs: Vec<Vec<Rational>>,
}

impl<'de> Deserialize<'de> for BigradedSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawSeries::deserialize(d)?;
        BigradedSeries::from_components(raw.r, raw.trunc, raw.coeffs)
            .map_err(serde::de::Error::custom)
    }
}

impl BigradedSeries {
    pub fn zero(r: usize, trunc: usize) -> Self {
        assert!(r >= 1, "group ring modulus must be at least 1");
        BigradedSeries {
            r,
            trunc,
            coeffs: vec![vec![Rational::zero(); trunc + 1]; r],
        }
    }

    pub fn one(r: usize, trunc: usize) -> Self {
        let mut s = Self::zero(r, trunc);
        s.coeffs[0][0] = Rational::one();
        s
    }

    pub fn from_components(
        r: usize,
        trunc: usize,
        coeffs: Vec<Vec<Rational>>,
    ) -> Result<Self, SeriesError> {
        if r == 0 || coeffs.len() != r {
            return Err(SeriesError::Malformed(format!(
                "expected {r} components, got {}",
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| c.len() != trunc + 1) {
            return Err(SeriesError::Malformed(format!(
                "component of length {} for truncation {trunc}",
                bad.len()
            )));
        }
        Ok(BigradedSeries { r, trunc, coeffs })
    }

    /// An `r = 1` series from its coefficients.
    pub fn single(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty());
        let trunc = coeffs.len() - 1;
        BigradedSeries {
            r: 1,
            trunc,
            coeffs: vec![coeffs],
        }
    }

    pub fn single_from_ints(coeffs: &[i64]) -> Self {
        Self::single(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, i: usize, n: usize) -> &Rational {
        &self.coeffs[i % self.r][n]
    }

    pub fn set(&mut self, i: usize, n: usize, value: Rational) {
        let r = self.r;
        self.coeffs[i % r][n] = value;
    }

    pub fn component(&self, i: usize) -> &[Rational] {
        &self.coeffs[i]
    }

    pub fn components(&self) -> &[Vec<Rational>] {
        &self.coeffs
    }

    pub fn truncated(&self, trunc: usize) -> Self {
        let trunc = trunc.min(self.trunc);
        let coeffs = self.coeffs.iter().map(|c| c[..=trunc].to_vec()).collect();
        BigradedSeries {
            r: self.r,
            trunc,
            coeffs,
        }
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.r != other.r {
            return Err(SeriesError::Incompatible(self.r, other.r));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..self.r)
            .map(|i| {
                (0..=trunc)
                    .map(|n| &self.coeffs[i][n] + &other.coeffs[i][n])
                    .collect()
            })
            .collect();
        Ok(BigradedSeries {
            r: self.r,
            trunc,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..self.r)
            .map(|i| {
                (0..=trunc)
                    .map(|n| &self.coeffs[i][n] - &other.coeffs[i][n])
                    .collect()
            })
            .collect();
        Ok(BigradedSeries {
            r: self.r,
            trunc,
            coeffs,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| row.iter().map(|x| x * c).collect())
            .collect();
        BigradedSeries {
            r: self.r,
            trunc: self.trunc,
            coeffs,
        }
    }

    /// Product in `Z[e]/(e^r-1)[[t]]`, truncated at the smaller truncation.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let r = self.r;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(r, trunc);
        for i in 0..r {
            for m in 0..=trunc {
                let a = &self.coeffs[i][m];
                if a.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let k = (i + j) % r;
                    for l in 0..=trunc - m {
                        let b = &other.coeffs[j][l];
                        if !b.is_zero() {
                            out.coeffs[k][m + l] += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplies in place by `(1 - e^i t^n)`.
    pub fn peel_in_place(&mut self, d: Bidegree) {
        if d.n == 0 {
            let r = self.r;
            let old = self.coeffs.clone();
            for (k, row) in old.iter().enumerate() {
                for (target, v) in self.coeffs[(k + d.i) % r].iter_mut().zip(row) {
                    *target -= v;
                }
            }
            return;
        }
        // descending m keeps the entries at m - n untouched until read
        for m in (d.n..=self.trunc).rev() {
            let shifted: Vec<Rational> = (0..self.r)
                .map(|k| self.coeffs[k][m - d.n].clone())
                .collect();
            for (k, v) in shifted.into_iter().enumerate() {
                if !v.is_zero() {
                    self.coeffs[(k + d.i) % self.r][m] -= v;
                }
            }
        }
    }

    /// Divides in place by `(1 - e^i t^n)`, `n >= 1`.
    pub fn unpeel_in_place(&mut self, d: Bidegree) -> Result<(), SeriesError> {
        if d.n == 0 {
            return Err(SeriesError::NonInvertible { i: d.i });
        }
        for m in d.n..=self.trunc {
            for k in 0..self.r {
                let v = self.coeffs[k][m - d.n].clone();
                if !v.is_zero() {
                    self.coeffs[(k + d.i) % self.r][m] += v;
                }
            }
        }
        Ok(())
    }

    pub fn peel(&self, d: Bidegree) -> Result<Self, SeriesError> {
        let mut out = self.clone();
        out.peel_in_place(Bidegree::new(d.n, d.i % self.r));
        Ok(out)
    }

    /// `sum_k e^{k i} t^{k n}`, the inverse of `1 - e^i t^n`.
    pub fn geometric_factor(d: Bidegree, r: usize, trunc: usize) -> Result<Self, SeriesError> {
        if d.n == 0 {
            return Err(SeriesError::NonInvertible { i: d.i });
        }
        let mut s = Self::zero(r, trunc);
        let mut k = 0;
        while k * d.n <= trunc {
            s.coeffs[(k * d.i) % r][k * d.n] = Rational::one();
            k += 1;
        }
        Ok(s)
    }

    /// Smallest `(n >= 1, then i)` with a nonzero coefficient.
    pub fn first_deviation(&self) -> Result<Option<(Bidegree, Rational)>, SeriesError> {
        self.check_normalized()?;
        for n in 1..=self.trunc {
            for i in 0..self.r {
                if !self.coeffs[i][n].is_zero() {
                    return Ok(Some((Bidegree::new(n, i), self.coeffs[i][n].clone())));
                }
            }
        }
        Ok(None)
    }

    fn check_normalized(&self) -> Result<(), SeriesError> {
        for i in 0..self.r {
            let expect = if i == 0 {
                Rational::one()
            } else {
                Rational::zero()
            };
            if self.coeffs[i][0] != expect {
                return Err(SeriesError::Unnormalized(format!(
                    "e^{i} t^0 has coefficient {}",
                    format_rational(&self.coeffs[i][0])
                )));
            }
        }
        Ok(())
    }

    /// Image under `e -> 1`.
    pub fn collapse(&self) -> Self {
        let coeffs = (0..=self.trunc)
            .map(|n| self.coeffs.iter().map(|c| &c[n]).sum())
            .collect();
        BigradedSeries::single(coeffs)
    }

    /// All coefficients nonnegative integers.
    pub fn validate_hilbert(&self) -> Result<(), SeriesError> {
        for (i, row) in self.coeffs.iter().enumerate() {
            for (n, x) in row.iter().enumerate() {
                if !is_integer(x) || x.is_negative() {
                    return Err(SeriesError::NotHilbert {
                        i,
                        n,
                        value: format_rational(x),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.r, self.trunc)
    }

    /// Nonzero terms as `(bidegree, coefficient)` in `(n, i)` order.
    pub fn terms(&self) -> Vec<(Bidegree, Rational)> {
        let mut out = Vec::new();
        for n in 0..=self.trunc {
            for i in 0..self.r {
                if !self.coeffs[i][n].is_zero() {
                    out.push((Bidegree::new(n, i), self.coeffs[i][n].clone()));
                }
            }
        }
        out
    }
}

impl fmt::Display for BigradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (d, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono = match (d.i, d.n) {
                (0, 0) => String::new(),
                (0, n) => power("t", n),
                (i, 0) => power("e", i),
                (i, n) => format!("{}{}", power("e", i), power("t", n)),
            };
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}{mono}", format_rational(&mag))?;
            }
        }
        write!(f, " + O(t^{})", self.trunc + 1)
    }
}

fn power(x: &str, k: usize) -> String {
    if k == 1 {
        x.to_string()
    } else {
        format!("{x}^{k}")
    }
}
