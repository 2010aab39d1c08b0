//! Reading generators and relations off a (bigraded) Hilbert series.
//!
//! A positive coefficient in the residual asks for new generators, a
//! negative one for relations. Once relations have appeared, a later
//! positive coefficient can only be a syzygy; the one non-complete-
//! intersection shape recognised is the codimension-3 Pfaffian format.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, gcd, to_i64};
use crate::series::{Bidegree, BigradedSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("non-integral coefficient {value} at {at}")]
    NonIntegral { at: Bidegree, value: String },
    #[error("positive coefficient at {at} after the relations closed the numerator, and the numerator is not of Pfaffian shape")]
    Syzygy { at: Bidegree },
    #[error("presentation is inconclusive; no action can be read off")]
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Clean,
    /// A generator and a relation are forced in the same t-degree.
    Special,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Clean => "clean",
            Status::Special => "special",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<Bidegree>,
    pub relations: Vec<Bidegree>,
    pub status: Status,
    pub codim: i64,
}

impl Presentation {
    fn build(mut generators: Vec<Bidegree>, mut relations: Vec<Bidegree>, status: Status) -> Self {
        generators.sort();
        relations.sort();
        let codim = generators.len() as i64 - 4;
        Presentation {
            generators,
            relations,
            status,
            codim,
        }
    }

    pub fn generator_degrees(&self) -> Vec<usize> {
        self.generators.iter().map(|g| g.n).collect()
    }

    pub fn relation_degrees(&self) -> Vec<usize> {
        self.relations.iter().map(|g| g.n).collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.generators.iter().map(|b| b.to_string()).collect();
        let r: Vec<String> = self.relations.iter().map(|b| b.to_string()).collect();
        write!(
            f,
            "gens {} | rels {} | {} (codim {})",
            g.join(" "),
            r.join(" "),
            self.status,
            self.codim
        )
    }
}

fn shares_degree(gens: &[Bidegree], rels: &[Bidegree]) -> bool {
    rels.iter().any(|r| gens.iter().any(|g| g.n == r.n))
}

/// Infers a minimal presentation, processing deviations in `(n, i)` order.
pub fn infer_presentation(
    s: &BigradedSeries,
    max_degree: usize,
) -> Result<Presentation, InferenceError> {
    let mut residual = s.clone();
    let mut gens: Vec<Bidegree> = Vec::new();
    let mut rels: Vec<Bidegree> = Vec::new();
    while let Some((d, c)) = residual.first_deviation()? {
        if d.n > max_degree {
            return Ok(Presentation::build(gens, rels, Status::Inconclusive));
        }
        let c = to_i64(&c).ok_or_else(|| InferenceError::NonIntegral {
            at: d,
            value: format_rational(&c),
        })?;
        if c > 0 {
            if !rels.is_empty() && rels.iter().all(|r| r.n != d.n) {
                if shares_degree(&gens, &rels) {
                    return Ok(Presentation::build(gens, rels, Status::Special));
                }
                if let Some(pf) = pfaffian_relations(s, &gens) {
                    return Ok(Presentation::build(gens, pf, Status::Clean));
                }
                return Err(InferenceError::Syzygy { at: d });
            }
            for _ in 0..c {
                gens.push(d);
                residual.peel_in_place(d);
            }
        } else {
            for _ in 0..-c {
                rels.push(d);
                residual.unpeel_in_place(d)?;
            }
        }
    }
    let status = if shares_degree(&gens, &rels) {
        Status::Special
    } else {
        Status::Clean
    };
    Ok(Presentation::build(gens, rels, status))
}

/// If `s * prod(1 - gens)` is `1 - sum e^i_k t^d_k + sum e^(kappa - i_k) t^(s - d_k) - e^kappa t^s`
/// for five relation bidegrees `(d_k, i_k)`, returns those relations.
pub fn pfaffian_relations(s: &BigradedSeries, gens: &[Bidegree]) -> Option<Vec<Bidegree>> {
    if gens.len() != 7 {
        return None;
    }
    let r = s.r();
    let mut num = s.clone();
    for g in gens {
        num.peel_in_place(*g);
    }
    let terms = num.terms();
    let (first, last) = (terms.first()?, terms.last()?);
    if first.0 != Bidegree::new(0, 0) || to_i64(&first.1) != Some(1) {
        return None;
    }
    let top = last.0;
    if top.n >= num.trunc() || to_i64(&last.1) != Some(-1) {
        return None;
    }
    let mut rels = Vec::new();
    let mut syz = Vec::new();
    for (d, c) in &terms[1..terms.len() - 1] {
        if d.n == top.n {
            return None;
        }
        let c = to_i64(c)?;
        let bucket = if c < 0 { &mut rels } else { &mut syz };
        bucket.extend(std::iter::repeat_n(*d, c.unsigned_abs() as usize));
    }
    if rels.len() != 5 {
        return None;
    }
    let mut mirrored: Vec<Bidegree> = rels
        .iter()
        .map(|d| Bidegree::new(top.n - d.n, (top.i + r - d.i) % r))
        .collect();
    mirrored.sort();
    syz.sort();
    (mirrored == syz).then_some(rels)
}

/// `prod (1 - e^i t^n)_{relations} / prod (1 - e^i t^n)_{generators}`.
pub fn presentation_series(
    generators: &[Bidegree],
    relations: &[Bidegree],
    r: usize,
    trunc: usize,
) -> Result<BigradedSeries, SeriesError> {
    let mut s = BigradedSeries::one(r, trunc);
    for d in relations {
        s.peel_in_place(Bidegree::new(d.n, d.i % r));
    }
    for d in generators {
        s.unpeel_in_place(Bidegree::new(d.n, d.i % r))?;
    }
    Ok(s)
}

/// Bidegrees carried by both a generator and a relation; such pairs cancel
/// in the series and cannot be recovered from it.
pub fn linear_cone_pairs(generators: &[Bidegree], relations: &[Bidegree]) -> Vec<Bidegree> {
    let mut gens = generators.to_vec();
    let mut out = Vec::new();
    for r in relations {
        if let Some(k) = gens.iter().position(|g| g == r) {
            gens.swap_remove(k);
            out.push(*r);
        }
    }
    out.sort();
    out
}

/// Ambient weights with their `Z/r` exponents, and the bidegree of each relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionData {
    pub coordinates: Vec<(usize, usize)>,
    pub relation_second_degrees: Vec<(usize, usize)>,
}

pub fn action_weights(p: &Presentation) -> Result<ActionData, InferenceError> {
    if p.status == Status::Inconclusive {
        return Err(InferenceError::Unresolved);
    }
    Ok(ActionData {
        coordinates: p.generators.iter().map(|g| (g.n, g.i)).collect(),
        relation_second_degrees: p.relations.iter().map(|g| (g.n, g.i)).collect(),
    })
}

impl ActionData {
    /// Equality up to `sigma -> u sigma` for a unit `u`, and up to the
    /// weighted rescaling `x_j -> lambda^{w_j} x_j`, which shifts each
    /// exponent by `k w` (and each relation by `k d`).
    pub fn equivalent_to(&self, other: &ActionData, r: usize, with_relations: bool) -> bool {
        let norm = |v: &[(usize, usize)], u: usize, k: usize| {
            let mut out: Vec<(usize, usize)> =
                v.iter().map(|&(w, e)| (w, (u * e + k * w) % r)).collect();
            out.sort();
            out
        };
        let target_c = norm(&other.coordinates, 1, 0);
        let target_r = norm(&other.relation_second_degrees, 1, 0);
        (1..r.max(2))
            .filter(|&u| gcd(u as i64, r as i64) == 1)
            .any(|u| {
                (0..r).any(|k| {
                    norm(&self.coordinates, u, k) == target_c
                        && (!with_relations
                            || norm(&self.relation_second_degrees, u, k) == target_r)
                })
            })
    }
}

impl fmt::Display for ActionData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self
            .coordinates
            .iter()
            .map(|(w, _)| w.to_string())
            .collect();
        let e: Vec<String> = self
            .coordinates
            .iter()
            .map(|(_, e)| e.to_string())
            .collect();
        let s: Vec<String> = self
            .relation_second_degrees
            .iter()
            .map(|(d, s)| format!("{d}:{s}"))
            .collect();
        write!(
            f,
            "P({}) exps ({}) eqs [{}]",
            w.join(","),
            e.join(","),
            s.join(" ")
        )
    }
}
