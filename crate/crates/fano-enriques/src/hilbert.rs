//! Hilbert series from numerical data.
//!
//! The plain series of a Fano threefold comes from the orbifold
//! Riemann–Roch closed form; the twisted series `sum h^0(-nK + i sigma) t^n`
//! differs from it by a periodic correction supported on the points where
//! the torsion divisor is not Cartier.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, int, is_even_integer, md, rat, rational_string, Rational};
use crate::orbifold::{contribution_cq, MarkedBasket, OrbifoldError, SingularityType, TypeBasket};
use crate::series::{Bidegree, BigradedSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    #[error("-K^3 must be positive, got {0}")]
    NonPositiveDegree(String),
    #[error("parity fails: -K^3 - sum b(r-b)/r = {0} is not an even integer")]
    Parity(String),
    #[error("torsion order must be at least 2, got {0}")]
    TorsionOrder(usize),
    #[error("point {0} in the torsion basket has l = 0")]
    TrivialMarking(String),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
    #[error("inconsistent data: coefficient of e^{i} t^{n} is {value}")]
    Inconsistent { i: usize, n: usize, value: String },
    #[error("closed form disagrees with the pointwise correction at e^{i} t^{n}: {closed} vs {pointwise}")]
    InternalConsistency {
        i: i64,
        n: usize,
        closed: String,
        pointwise: String,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("weights and degrees do not satisfy sum(weights) - sum(degrees) = 1")]
    Polarization,
}

/// `-K^3 - sum_Q b_Q (r_Q - b_Q) / r_Q`, which is an even integer for the
/// numerical data of a Fano threefold.
pub fn parity_defect(minus_k3: &Rational, basket: &TypeBasket) -> Rational {
    basket.items().fold(minus_k3.clone(), |acc, t| {
        let b = t.inverse_weight();
        acc - rat(b * (t.r() - b), t.r())
    })
}

pub fn parity_holds(minus_k3: &Rational, basket: &TypeBasket) -> bool {
    is_even_integer(&parity_defect(minus_k3, basket))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanoData {
    #[serde(rename = "minusK3", with = "rational_string")]
    minus_k3: Rational,
    basket: TypeBasket,
}

impl FanoData {
    pub fn new(minus_k3: Rational, basket: TypeBasket) -> Result<Self, HilbertError> {
        if !minus_k3.is_positive() {
            return Err(HilbertError::NonPositiveDegree(format_rational(&minus_k3)));
        }
        let defect = parity_defect(&minus_k3, &basket);
        if !is_even_integer(&defect) {
            return Err(HilbertError::Parity(format_rational(&defect)));
        }
        Ok(FanoData { minus_k3, basket })
    }

    pub fn minus_k3(&self) -> &Rational {
        &self.minus_k3
    }

    pub fn basket(&self) -> &TypeBasket {
        &self.basket
    }
}

#[derive(Deserialize)]
struct RawFanoData {
    #[serde(rename = "minusK3", with = "rational_string")]
    minus_k3: Rational,
    basket: TypeBasket,
}

impl<'de> Deserialize<'de> for FanoData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawFanoData::deserialize(d)?;
        FanoData::new(raw.minus_k3, raw.basket).map_err(serde::de::Error::custom)
    }
}

/// Numerical data of a threefold with an `r`-torsion divisor: the marked
/// part `bt` of the basket (where the divisor is not Cartier) and the rest `be`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FanoEnriquesData {
    r: usize,
    #[serde(rename = "minusK3", with = "rational_string")]
    minus_k3: Rational,
    bt: MarkedBasket,
    be: TypeBasket,
}

#[derive(Deserialize)]
struct RawFeData {
    r: usize,
    #[serde(rename = "minusK3", with = "rational_string")]
    minus_k3: Rational,
    bt: MarkedBasket,
    #[serde(default)]
    be: TypeBasket,
}

impl<'de> Deserialize<'de> for FanoEnriquesData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawFeData::deserialize(d)?;
        FanoEnriquesData::new(raw.r, raw.minus_k3, raw.bt, raw.be).map_err(serde::de::Error::custom)
    }
}

impl FanoEnriquesData {
    pub fn new(
        r: usize,
        minus_k3: Rational,
        bt: MarkedBasket,
        be: TypeBasket,
    ) -> Result<Self, HilbertError> {
        if r < 2 {
            return Err(HilbertError::TorsionOrder(r));
        }
        for m in bt.items() {
            if m.l() == 0 {
                return Err(HilbertError::TrivialMarking(m.to_string()));
            }
            crate::orbifold::preimage_singularity(*m, r as i64)?;
        }
        FanoData::new(minus_k3.clone(), bt.unmarked().union(&be))?;
        Ok(FanoEnriquesData {
            r,
            minus_k3,
            bt,
            be,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn minus_k3(&self) -> &Rational {
        &self.minus_k3
    }

    pub fn bt(&self) -> &MarkedBasket {
        &self.bt
    }

    pub fn be(&self) -> &TypeBasket {
        &self.be
    }

    /// The data forgetting the torsion divisor.
    pub fn fano_data(&self) -> FanoData {
        FanoData {
            minus_k3: self.minus_k3.clone(),
            basket: self.bt.unmarked().union(&self.be),
        }
    }
}

fn f_term(t: SingularityType, j: i64) -> Rational {
    let r = t.r();
    let x = md(t.inverse_weight() * j, r);
    rat(x * (r - x), 2 * r)
}

fn binomial3(m: i64) -> i64 {
    if m < 3 {
        0
    } else {
        m * (m - 1) * (m - 2) / 6
    }
}

/// Coefficient of `t^n` in the orbifold Riemann–Roch series, evaluated
/// pointwise; the series below expands the same closed form as a product.
pub fn altinok_coefficient(minus_k3: &Rational, basket: &TypeBasket, n: usize) -> Rational {
    let n = n as i64;
    let mut v = int(2 * n + 1) + minus_k3 * rat(binomial3(n + 2) + binomial3(n + 1), 2);
    for t in basket.items() {
        for i in 1..t.r().min(n + 1) {
            v -= f_term(*t, i) * int((n - i) / t.r() + 1);
        }
    }
    v
}

fn series_from_poly(coeffs: &[(usize, Rational)], trunc: usize) -> BigradedSeries {
    let mut s = BigradedSeries::zero(1, trunc);
    for (n, c) in coeffs {
        if *n <= trunc {
            let v = s.coeff(0, *n) + c;
            s.set(0, *n, v);
        }
    }
    s
}

fn divide_by(mut s: BigradedSeries, degrees: &[usize]) -> BigradedSeries {
    for &d in degrees {
        s.unpeel_in_place(Bidegree::new(d, 0))
            .expect("positive degree");
    }
    s
}

fn check_hilbert(s: &BigradedSeries) -> Result<(), HilbertError> {
    match s.validate_hilbert() {
        Ok(()) => Ok(()),
        Err(SeriesError::NotHilbert { i, n, value }) => {
            Err(HilbertError::Inconsistent { i, n, value })
        }
        Err(e) => Err(e.into()),
    }
}

/// `(1+t)/(1-t)^2 + (t+t^2)/(1-t)^4 (-K^3/2) - sum_Q (sum_i f_Q(i) t^i)/((1-t)(1-t^r_Q))`.
pub fn altinok_series(data: &FanoData, trunc: usize) -> Result<BigradedSeries, HilbertError> {
    let mut total = divide_by(
        series_from_poly(&[(0, int(1)), (1, int(1))], trunc),
        &[1, 1],
    );
    let half = &data.minus_k3 / int(2);
    let cubic = divide_by(
        series_from_poly(&[(1, half.clone()), (2, half)], trunc),
        &[1, 1, 1, 1],
    );
    total = total.add(&cubic)?;
    for (t, m) in data.basket.entries() {
        let poly: Vec<(usize, Rational)> = (1..t.r())
            .map(|i| (i as usize, f_term(*t, i) * int(*m as i64)))
            .collect();
        let corr = divide_by(series_from_poly(&poly, trunc), &[1, t.r() as usize]);
        total = total.sub(&corr)?;
    }
    check_hilbert(&total)?;
    Ok(total)
}

/// `chi(-nK + i sigma) - chi(-nK)` as a sum of local contributions, using
/// the effective coefficient `[i l_Q]` at each marked point.
pub fn torsion_delta_at(bt: &MarkedBasket, i: i64, n: i64) -> Rational {
    let mut total = Rational::zero();
    for (m, mult) in bt.entries() {
        let t = m.ty();
        let lp = md(i * m.l(), t.r());
        if lp == 0 {
            continue;
        }
        let d = contribution_cq(t, lp - n) - contribution_cq(t, -n);
        total += d * int(*mult as i64);
    }
    total
}

/// Closed-form (rational function) expansion of the correction series,
/// checked coefficientwise against [`torsion_delta_at`].
pub fn torsion_delta_series(
    bt: &MarkedBasket,
    i: i64,
    trunc: usize,
) -> Result<BigradedSeries, HilbertError> {
    let mut total = BigradedSeries::zero(1, trunc);
    for (m, mult) in bt.entries() {
        let t = m.ty();
        let r = t.r();
        let lp = md(i * m.l(), r);
        let mult = int(*mult as i64);
        let constant = rat((r - lp) * (r * r - 1), 12 * r) * &mult;
        let periodic: Vec<(usize, Rational)> = (0..r)
            .map(|j| {
                let g: Rational = (j + 1..=j + r - lp).map(|k| f_term(t, k)).sum();
                (j as usize, g * &mult)
            })
            .collect();
        let a = divide_by(series_from_poly(&[(0, constant)], trunc), &[1]);
        let b = divide_by(series_from_poly(&periodic, trunc), &[r as usize]);
        total = total.add(&a)?.sub(&b)?;
    }
    for n in 0..=trunc {
        let pointwise = torsion_delta_at(bt, i, n as i64);
        if *total.coeff(0, n) != pointwise {
            return Err(HilbertError::InternalConsistency {
                i,
                n,
                closed: format_rational(total.coeff(0, n)),
                pointwise: format_rational(&pointwise),
            });
        }
    }
    Ok(total)
}

/// `sum_i e^i sum_n h^0(-nK + i sigma) t^n`.
pub fn bigraded_series(
    data: &FanoEnriquesData,
    trunc: usize,
) -> Result<BigradedSeries, HilbertError> {
    let base = altinok_series(&data.fano_data(), trunc)?;
    let mut comps = Vec::with_capacity(data.r);
    for i in 0..data.r {
        let delta = torsion_delta_series(&data.bt, i as i64, trunc)?;
        let comp = base.add(&delta)?;
        comps.push(comp.component(0).to_vec());
    }
    let s = BigradedSeries::from_components(data.r, trunc, comps)?;
    check_hilbert(&s)?;
    for i in 1..data.r {
        if !s.coeff(i, 0).is_zero() {
            return Err(HilbertError::Inconsistent {
                i,
                n: 0,
                value: format_rational(s.coeff(i, 0)),
            });
        }
    }
    Ok(s)
}

/// `prod (1 - t^d) / prod (1 - t^a)`.
pub fn wci_series(
    weights: &[usize],
    degrees: &[usize],
    trunc: usize,
) -> Result<BigradedSeries, HilbertError> {
    if weights.iter().sum::<usize>() != degrees.iter().sum::<usize>() + 1 {
        return Err(HilbertError::Polarization);
    }
    let mut s = BigradedSeries::one(1, trunc);
    for &d in degrees {
        s.peel_in_place(Bidegree::new(d, 0));
    }
    Ok(divide_by(s, weights))
}

/// Series of a codimension-3 Pfaffian format: numerator
/// `1 - sum t^d_k + sum t^(s - d_k) - t^s` with `s = sum(weights) - 1`.
pub fn pfaffian_series(
    weights: &[usize],
    degrees: &[usize],
    trunc: usize,
) -> Result<BigradedSeries, HilbertError> {
    let s = weights.iter().sum::<usize>() - 1;
    if degrees.len() != 5
        || degrees.iter().sum::<usize>() != 2 * s
        || degrees.iter().any(|&d| d >= s)
    {
        return Err(HilbertError::Polarization);
    }
    let mut poly = vec![(0, Rational::one()), (s, -Rational::one())];
    for &d in degrees {
        poly.push((d, -Rational::one()));
        poly.push((s - d, Rational::one()));
    }
    Ok(divide_by(series_from_poly(&poly, trunc), weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::to_i64;

    fn t(r: i64, a: i64) -> SingularityType {
        SingularityType::new(r, a).unwrap()
    }

    fn ints(s: &[Rational]) -> Vec<i64> {
        s.iter().map(|x| to_i64(x).unwrap()).collect()
    }

    pub(crate) fn example_bt() -> MarkedBasket {
        [
            t(10, 3).marked(6).unwrap(),
            t(5, 2).marked(1).unwrap(),
            t(5, 2).marked(1).unwrap(),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn quintic_series() {
        let d = FanoData::new(rat(5, 2), [t(2, 1)].into_iter().collect()).unwrap();
        let s = altinok_series(&d, 9).unwrap();
        assert_eq!(
            ints(s.component(0)),
            [1, 4, 11, 24, 46, 79, 126, 189, 271, 374]
        );
    }

    #[test]
    fn quartic_series() {
        let d = FanoData::new(int(4), TypeBasket::new()).unwrap();
        let s = altinok_series(&d, 5).unwrap();
        assert_eq!(ints(s.component(0)), [1, 5, 15, 35, 69, 121]);
    }

    #[test]
    fn pointwise_matches_expansion() {
        let basket: TypeBasket = [t(10, 3), t(5, 2), t(5, 2)].into_iter().collect();
        let d = FanoData::new(rat(1, 2), basket.clone()).unwrap();
        let s = altinok_series(&d, 30).unwrap();
        for n in 0..=30 {
            assert_eq!(*s.coeff(0, n), altinok_coefficient(&rat(1, 2), &basket, n));
        }
        assert_eq!(
            ints(&s.component(0)[..10]),
            [1, 1, 2, 5, 9, 16, 25, 38, 54, 74]
        );
    }

    #[test]
    fn parity() {
        assert!(FanoData::new(rat(5, 2), [t(2, 1)].into_iter().collect()).is_ok());
        assert!(matches!(
            FanoData::new(
                rat(5, 6),
                [t(3, 1), t(3, 1), t(3, 1), t(3, 1), t(6, 1)]
                    .into_iter()
                    .collect()
            ),
            Err(HilbertError::Parity(_))
        ));
        assert!(FanoData::new(int(0), TypeBasket::new()).is_err());
    }

    #[test]
    fn delta_hand_values() {
        let bt = example_bt();
        assert_eq!(torsion_delta_at(&bt, 1, 0), int(-1));
        assert_eq!(torsion_delta_at(&bt, 1, 1), int(0));
        for n in 0..12 {
            assert_eq!(torsion_delta_at(&bt, 0, n), int(0));
        }
        let s = torsion_delta_series(&bt, 2, 12).unwrap();
        assert_eq!(*s.coeff(0, 2), int(1));
        assert!(torsion_delta_series(&bt, 0, 12).unwrap().components()[0]
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn delta_proof_form() {
        // (r-l)(r^2-1)/(12r) - sum_{j=n+1}^{n+r-l} f(j), summed over the points
        let bt = example_bt();
        for i in 0..5 {
            for n in 0..25 {
                let mut v = Rational::zero();
                for m in bt.items() {
                    let r = m.ty().r();
                    let l = md(i * m.l(), r);
                    v += rat((r - l) * (r * r - 1), 12 * r);
                    for j in n + 1..=n + r - l {
                        v -= f_term(m.ty(), j);
                    }
                }
                assert_eq!(v, torsion_delta_at(&bt, i, n), "i={i} n={n}");
            }
        }
    }

    #[test]
    fn bigraded_components() {
        let data = FanoEnriquesData::new(5, rat(1, 2), example_bt(), TypeBasket::new()).unwrap();
        let s = bigraded_series(&data, 20).unwrap();
        assert_eq!(
            ints(&s.component(0)[..10]),
            [1, 1, 2, 5, 9, 16, 25, 38, 54, 74]
        );
        let cover = altinok_series(
            &FanoData::new(rat(5, 2), [t(2, 1)].into_iter().collect()).unwrap(),
            20,
        )
        .unwrap();
        assert_eq!(s.collapse(), cover);
        assert_eq!(ints(&s.component(2)[..3]), [0, 0, 3]);
    }

    #[test]
    fn complete_intersections() {
        let s = wci_series(&[1, 1, 1, 1, 2], &[5], 5).unwrap();
        assert_eq!(ints(s.component(0)), [1, 4, 11, 24, 46, 79]);
        let s = wci_series(&[1; 7], &[2, 2, 2], 3).unwrap();
        assert_eq!(ints(s.component(0)), [1, 7, 25, 63]);
        assert!(wci_series(&[1, 1], &[5], 3).is_err());
    }

    #[test]
    fn pfaffian_format() {
        let d = FanoData::new(rat(5, 2), vec![t(2, 1); 5].into_iter().collect()).unwrap();
        let a = altinok_series(&d, 30).unwrap();
        assert_eq!(
            pfaffian_series(&[1, 1, 1, 2, 2, 2, 2], &[4, 4, 4, 4, 4], 30).unwrap(),
            a
        );
    }
}
