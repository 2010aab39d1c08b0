//! From a catalog Fano threefold `Y` and a torsion basket to the numerical
//! data of a quotient `X = Y / (Z/r)`.
//!
//! The points of `B_t` force a precise set of singularities on `Y`; what is
//! left of the basket of `Y` must fall into free orbits of size `r`, and the
//! assembled data must pass the parity condition. Accepted data are then fed
//! to the graded-rings inference.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{enumerate_all, BtCandidate, EnumerationOptions};
use crate::exact::{format_rational, int, is_even_integer, rational_string, Rational};
use crate::gradedrings::{action_weights, infer_presentation, ActionData, Presentation, Status};
use crate::hilbert::{
    altinok_series, bigraded_series, parity_defect, pfaffian_series, wci_series, FanoData,
    FanoEnriquesData, HilbertError,
};
use crate::orbifold::{preimage_singularity, Fiber, MarkedBasket, OrbifoldError, TypeBasket};
use crate::series::BigradedSeries;

/// Truncation used when validating cover records.
pub const VALIDATION_TRUNC: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverFormat {
    /// Weighted complete intersection.
    Ci,
    /// Codimension 3, cut out by the five Pfaffians of a skew 5x5 matrix.
    Pfaffian,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("{name}: sum of weights minus sum of degrees is {value}, expected 1")]
    Polarization { name: String, value: i64 },
    #[error("{name}: {detail}")]
    Shape { name: String, detail: String },
    #[error("{name}: -K^3 is {declared}, but the weights and degrees give {expected}")]
    Degree {
        name: String,
        declared: String,
        expected: String,
    },
    #[error("{name}: parity fails, -K^3 - sum b(r-b)/r = {defect}")]
    Parity { name: String, defect: String },
    #[error("{name}: basket and equations disagree at t^{n}: {from_basket} from the basket, {from_equations} from the equations")]
    SeriesMismatch {
        name: String,
        n: usize,
        from_basket: String,
        from_equations: String,
    },
    #[error("{name}: {source}")]
    Hilbert { name: String, source: HilbertError },
}

/// A Fano threefold `Y` from a catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRecord {
    pub name: String,
    pub format: CoverFormat,
    pub weights: Vec<usize>,
    pub degrees: Vec<usize>,
    #[serde(rename = "minusK3", with = "rational_string")]
    pub minus_k3: Rational,
    pub basket: TypeBasket,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CoverRecord {
    /// Codimension of `Y` in its weighted projective space.
    pub fn codim(&self) -> i64 {
        self.weights.len() as i64 - 4
    }

    /// Hilbert series read off the equations.
    pub fn series(&self, trunc: usize) -> Result<BigradedSeries, HilbertError> {
        match self.format {
            CoverFormat::Ci => wci_series(&self.weights, &self.degrees, trunc),
            CoverFormat::Pfaffian => pfaffian_series(&self.weights, &self.degrees, trunc),
        }
    }

    pub fn fano_data(&self) -> Result<FanoData, HilbertError> {
        FanoData::new(self.minus_k3.clone(), self.basket.clone())
    }

    pub fn validate(&self) -> Result<(), CoverError> {
        let name = self.name.clone();
        let shape = |detail: &str| CoverError::Shape {
            name: name.clone(),
            detail: detail.to_string(),
        };
        if self.weights.is_empty() || self.weights.contains(&0) || self.degrees.contains(&0) {
            return Err(shape("weights and degrees must be positive"));
        }
        let sw: usize = self.weights.iter().sum();
        match self.format {
            CoverFormat::Ci => {
                if self.weights.len() != self.degrees.len() + 4 {
                    return Err(shape(
                        "a threefold complete intersection needs #weights = #degrees + 4",
                    ));
                }
                let sd: usize = self.degrees.iter().sum();
                if sw as i64 - sd as i64 != 1 {
                    return Err(CoverError::Polarization {
                        name,
                        value: sw as i64 - sd as i64,
                    });
                }
                let expected = self
                    .degrees
                    .iter()
                    .fold(Rational::one(), |acc, &d| acc * int(d as i64))
                    / self
                        .weights
                        .iter()
                        .fold(Rational::one(), |acc, &w| acc * int(w as i64));
                if expected != self.minus_k3 {
                    return Err(CoverError::Degree {
                        name,
                        declared: format_rational(&self.minus_k3),
                        expected: format_rational(&expected),
                    });
                }
            }
            CoverFormat::Pfaffian => {
                if self.weights.len() != 7 || self.degrees.len() != 5 {
                    return Err(shape("Pfaffian format needs 7 weights and 5 degrees"));
                }
                let sd: usize = self.degrees.iter().sum();
                if sd != 2 * (sw - 1) {
                    return Err(CoverError::Polarization {
                        name,
                        value: sw as i64 - (sd / 2) as i64,
                    });
                }
            }
        }
        let defect = parity_defect(&self.minus_k3, &self.basket);
        if !is_even_integer(&defect) {
            return Err(CoverError::Parity {
                name,
                defect: format_rational(&defect),
            });
        }
        let hil = |source| CoverError::Hilbert {
            name: name.clone(),
            source,
        };
        let from_basket =
            altinok_series(&self.fano_data().map_err(hil)?, VALIDATION_TRUNC).map_err(hil)?;
        let from_equations = self.series(VALIDATION_TRUNC).map_err(hil)?;
        for n in 0..=VALIDATION_TRUNC {
            let (a, b) = (from_basket.coeff(0, n), from_equations.coeff(0, n));
            if a != b {
                return Err(CoverError::SeriesMismatch {
                    name,
                    n,
                    from_basket: format_rational(a),
                    from_equations: format_rational(b),
                });
            }
        }
        Ok(())
    }
}

/// Points forced on the cover by `B_t`: each marked point of local order
/// `alpha` has `r / alpha` preimages of index `gcd(r_Q, l_Q)`.
pub fn forced_preimage(bt: &MarkedBasket, r: usize) -> Result<TypeBasket, OrbifoldError> {
    let mut out = TypeBasket::new();
    for (m, mult) in bt.entries() {
        if let (count, Fiber::Singular(t)) = preimage_singularity(*m, r as i64)? {
            out.add(t, count as usize * mult);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Rejection {
    #[error("preimage-mismatch: forced points {forced} are not all in the cover basket")]
    PreimageMismatch { forced: String },
    #[error("orbit-indivisible: {point} remains {count} times, not a multiple of {r}")]
    OrbitIndivisible {
        point: String,
        count: usize,
        r: usize,
    },
    #[error("parity-fail: -K^3 - sum b(r-b)/r = {defect} is not an even integer")]
    ParityFail { defect: String },
    #[error("invalid: {detail}")]
    Invalid { detail: String },
}

impl Rejection {
    pub fn kind(&self) -> &'static str {
        match self {
            Rejection::PreimageMismatch { .. } => "preimage-mismatch",
            Rejection::OrbitIndivisible { .. } => "orbit-indivisible",
            Rejection::ParityFail { .. } => "parity-fail",
            Rejection::Invalid { .. } => "invalid",
        }
    }
}

/// Assembles the numerical data of `Y / (Z/r)` with torsion basket `bt`.
pub fn match_cover(
    y: &CoverRecord,
    bt: &MarkedBasket,
    r: usize,
) -> Result<FanoEnriquesData, Rejection> {
    let forced = forced_preimage(bt, r).map_err(|e| Rejection::Invalid {
        detail: e.to_string(),
    })?;
    let residual = y
        .basket
        .difference(&forced)
        .ok_or_else(|| Rejection::PreimageMismatch {
            forced: forced.to_string(),
        })?;
    let mut be = TypeBasket::new();
    for (t, count) in residual.entries() {
        if count % r != 0 {
            return Err(Rejection::OrbitIndivisible {
                point: t.to_string(),
                count: *count,
                r,
            });
        }
        be.add(*t, count / r);
    }
    let minus_k3 = &y.minus_k3 / int(r as i64);
    let defect = parity_defect(&minus_k3, &bt.unmarked().union(&be));
    if !is_even_integer(&defect) {
        return Err(Rejection::ParityFail {
            defect: format_rational(&defect),
        });
    }
    FanoEnriquesData::new(r, minus_k3, bt.clone(), be).map_err(|e| Rejection::Invalid {
        detail: e.to_string(),
    })
}

/// A torsion basket with the label it is listed under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelledBt {
    pub label: String,
    pub bt: BtCandidate,
}

/// All admissible torsion baskets, labelled `r.k` in enumeration order.
pub fn labelled_baskets(opts: EnumerationOptions) -> Vec<LabelledBt> {
    enumerate_all(opts)
        .into_iter()
        .flat_map(|(r, v)| {
            v.into_iter().enumerate().map(move |(k, bt)| LabelledBt {
                label: format!("{r}.{}", k + 1),
                bt,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientCandidate {
    pub cover: String,
    pub cover_codim: i64,
    pub bt_label: String,
    #[serde(flatten)]
    pub data: FanoEnriquesData,
    pub presentation: Presentation,
    pub action: ActionData,
    /// The inferred presentation lives in a different codimension than the cover.
    pub cross_codimension: bool,
    pub diagnostics: Vec<String>,
}

impl fmt::Display for QuotientCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | r={} | Bt {} = {} | Be {} | -K^3 {} | {}",
            self.cover,
            self.data.r(),
            self.bt_label,
            self.data.bt(),
            self.data.be(),
            format_rational(self.data.minus_k3()),
            self.action
        )?;
        if self.presentation.status == Status::Special {
            write!(f, " | special")?;
        }
        if self.cross_codimension {
            write!(f, " | from codim {}", self.cover_codim)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectionRecord {
    pub cover: String,
    pub bt_label: String,
    pub reason: Rejection,
}

/// Data that matched numerically but produced no usable presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub cover: String,
    pub bt_label: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Restrict to one torsion order.
    pub r: Option<usize>,
    pub trunc: usize,
    pub max_degree: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            r: None,
            trunc: 40,
            max_degree: 24,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub candidates: Vec<QuotientCandidate>,
    pub rejections: Vec<RejectionRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SearchReport {
    /// Candidates grouped by the codimension of the inferred presentation.
    pub fn by_codim(&self) -> BTreeMap<i64, Vec<&QuotientCandidate>> {
        let mut out: BTreeMap<i64, Vec<&QuotientCandidate>> = BTreeMap::new();
        for c in &self.candidates {
            out.entry(c.presentation.codim).or_default().push(c);
        }
        out
    }

    pub fn rejection_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rejections {
            *out.entry(r.reason.kind()).or_insert(0) += 1;
        }
        out
    }
}

enum Outcome {
    Candidate(Box<QuotientCandidate>),
    Rejected(RejectionRecord),
    Diagnostic(Diagnostic),
}

fn examine(y: &CoverRecord, lb: &LabelledBt, opts: SearchOptions) -> Outcome {
    let r = lb.bt.r();
    let diag = |message: String| {
        Outcome::Diagnostic(Diagnostic {
            cover: y.name.clone(),
            bt_label: lb.label.clone(),
            message,
        })
    };
    let data = match match_cover(y, lb.bt.entries(), r) {
        Ok(d) => d,
        Err(reason) => {
            return Outcome::Rejected(RejectionRecord {
                cover: y.name.clone(),
                bt_label: lb.label.clone(),
                reason,
            })
        }
    };
    let series = match bigraded_series(&data, opts.trunc) {
        Ok(s) => s,
        Err(e) => return diag(format!("bigraded series: {e}")),
    };
    let mut diagnostics = Vec::new();
    match y.series(opts.trunc) {
        Ok(cover_series) if series.collapse() == cover_series => {
            diagnostics.push("components sum to the cover series".to_string())
        }
        Ok(_) => return diag("components do not sum to the cover series".to_string()),
        Err(e) => return diag(format!("cover series: {e}")),
    }
    let presentation = match infer_presentation(&series, opts.max_degree) {
        Ok(p) if p.status == Status::Inconclusive => {
            return diag(format!(
                "inference inconclusive up to degree {}",
                opts.max_degree
            ))
        }
        Ok(p) => p,
        Err(e) => return diag(format!("inference: {e}")),
    };
    let action = match action_weights(&presentation) {
        Ok(a) => a,
        Err(e) => return diag(format!("action: {e}")),
    };
    if presentation.status == Status::Special {
        diagnostics.push("a generator and a relation share a degree".to_string());
    }
    let cross_codimension = presentation.codim != y.codim();
    Outcome::Candidate(Box::new(QuotientCandidate {
        cover: y.name.clone(),
        cover_codim: y.codim(),
        bt_label: lb.label.clone(),
        data,
        presentation,
        action,
        cross_codimension,
        diagnostics,
    }))
}

/// Runs every (cover, basket) pair. The output order follows the catalog,
/// then the basket list, whatever the number of worker threads.
pub fn search(
    catalog: &[CoverRecord],
    baskets: &[LabelledBt],
    opts: SearchOptions,
) -> SearchReport {
    let pairs: Vec<(&CoverRecord, &LabelledBt)> = catalog
        .iter()
        .flat_map(|y| baskets.iter().map(move |b| (y, b)))
        .filter(|(_, b)| opts.r.is_none_or(|r| r == b.bt.r()))
        .collect();
    let outcomes: Vec<Outcome> = pairs.par_iter().map(|(y, b)| examine(y, b, opts)).collect();
    let mut report = SearchReport::default();
    let mut seen = BTreeSet::new();
    for o in outcomes {
        match o {
            Outcome::Candidate(c) => {
                if seen.insert((c.cover.clone(), c.data.clone())) {
                    report.candidates.push(*c);
                }
            }
            Outcome::Rejected(r) => report.rejections.push(r),
            Outcome::Diagnostic(d) => report.diagnostics.push(d),
        }
    }
    report
}

/// `r * (-K_X^3) = -K_Y^3` and the parity of the assembled basket.
pub fn candidate_consistent(y: &CoverRecord, c: &QuotientCandidate) -> bool {
    let r = int(c.data.r() as i64);
    let basket = c.data.bt().unmarked().union(c.data.be());
    c.data.minus_k3() * r == y.minus_k3
        && is_even_integer(&parity_defect(c.data.minus_k3(), &basket))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rational, rat};
    use crate::orbifold::SingularityType;

    fn ty(r: i64, a: i64) -> SingularityType {
        SingularityType::new(r, a).unwrap()
    }

    fn marked(pts: &[(i64, i64, i64, usize)]) -> MarkedBasket {
        let mut b = MarkedBasket::new();
        for &(r, a, l, k) in pts {
            b.add(ty(r, a).marked(l).unwrap(), k);
        }
        b
    }

    fn cover(
        name: &str,
        w: &[usize],
        d: &[usize],
        k3: &str,
        basket: &[(i64, i64, usize)],
    ) -> CoverRecord {
        let mut b = TypeBasket::new();
        for &(r, a, k) in basket {
            b.add(ty(r, a), k);
        }
        CoverRecord {
            name: name.to_string(),
            format: CoverFormat::Ci,
            weights: w.to_vec(),
            degrees: d.to_vec(),
            minus_k3: parse_rational(k3).unwrap(),
            basket: b,
            note: None,
        }
    }

    fn y5() -> CoverRecord {
        cover(
            "Y_{5} in P(1,1,1,1,2)",
            &[1, 1, 1, 1, 2],
            &[5],
            "5/2",
            &[(2, 1, 1)],
        )
    }

    #[test]
    fn forced_preimages() {
        let bt51 = marked(&[(5, 2, 1, 2), (10, 3, 6, 1)]);
        assert_eq!(
            forced_preimage(&bt51, 5).unwrap(),
            TypeBasket::from_items([ty(2, 1)])
        );
        assert!(forced_preimage(&marked(&[(2, 1, 1, 8)]), 2)
            .unwrap()
            .is_empty());
        let bt36 = marked(&[(3, 1, 1, 4), (6, 1, 4, 1)]);
        assert_eq!(
            forced_preimage(&bt36, 3).unwrap(),
            TypeBasket::from_items([ty(2, 1)])
        );
    }

    #[test]
    fn matching() {
        let bt51 = marked(&[(5, 2, 1, 2), (10, 3, 6, 1)]);
        let x = match_cover(&y5(), &bt51, 5).unwrap();
        assert_eq!(*x.minus_k3(), rat(1, 2));
        assert!(x.be().is_empty());

        let y8 = cover(
            "Y_{8} in P(1,1,1,2,4)",
            &[1, 1, 1, 2, 4],
            &[8],
            "1",
            &[(2, 1, 2)],
        );
        let x = match_cover(&y8, &marked(&[(2, 1, 1, 8)]), 2).unwrap();
        assert_eq!(*x.minus_k3(), rat(1, 2));
        assert_eq!(*x.be(), TypeBasket::from_items([ty(2, 1)]));

        let y4 = cover("Y_{4} in P(1,1,1,1,1)", &[1; 5], &[4], "4", &[]);
        let bt = marked(&[(2, 1, 1, 1), (14, 1, 7, 1)]);
        assert_eq!(
            match_cover(&y4, &bt, 2).unwrap_err().kind(),
            "preimage-mismatch"
        );

        let bt36 = marked(&[(3, 1, 1, 4), (6, 1, 4, 1)]);
        let err = match_cover(&y5(), &bt36, 3).unwrap_err();
        assert_eq!(err.kind(), "parity-fail");
    }

    #[test]
    fn orbit_divisibility() {
        let y = cover("Y_{6} in P(1,1,1,1,3)", &[1, 1, 1, 1, 3], &[6], "2", &[]);
        assert!(y.validate().is_ok());
        let y = cover(
            "Y_{6} in P(1,1,1,2,2)",
            &[1, 1, 1, 2, 2],
            &[6],
            "3/2",
            &[(2, 1, 3)],
        );
        assert!(y.validate().is_ok());
        let err = match_cover(&y, &marked(&[(2, 1, 1, 8)]), 2).unwrap_err();
        assert_eq!(
            err,
            Rejection::OrbitIndivisible {
                point: "1/2(1,1,1)".into(),
                count: 3,
                r: 2
            }
        );
    }

    #[test]
    fn validation_errors() {
        let mut y = y5();
        y.degrees = vec![4];
        assert!(matches!(y.validate(), Err(CoverError::Polarization { .. })));
        let mut y = y5();
        y.minus_k3 = rat(5, 1);
        assert!(matches!(y.validate(), Err(CoverError::Degree { .. })));
        let y = cover(
            "Y_{6} in P(1,1,1,1,2)",
            &[1, 1, 1, 2, 2],
            &[6],
            "3/2",
            &[(3, 1, 1)],
        );
        assert!(matches!(y.validate(), Err(CoverError::Parity { .. })));
        // right degree and parity, wrong basket: four 1/2 points instead of three
        let y = cover(
            "Y_{6} in P(1,1,1,2,2)",
            &[1, 1, 1, 2, 2],
            &[6],
            "3/2",
            &[(2, 1, 3), (3, 1, 1), (3, 1, 1)],
        );
        match y.validate() {
            Err(CoverError::Parity { .. }) | Err(CoverError::SeriesMismatch { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(y5().validate().is_ok());
    }

    #[test]
    fn series_mismatch_names_coefficient() {
        // two 1/4 points pass the parity test but not the series identity
        let y = cover(
            "Y_{6} in P(1,1,1,2,2)",
            &[1, 1, 1, 2, 2],
            &[6],
            "3/2",
            &[(4, 1, 2)],
        );
        match y.validate() {
            Err(CoverError::SeriesMismatch { n, .. }) => assert!(n >= 2),
            other => panic!("{other:?}"),
        }
    }
}
