//! Exhaustive search for torsion baskets `B_t`.
//!
//! A candidate is a multiset of marked points `(1/r_Q(1,a,-a))_{l_Q}` with
//! every local order `r_Q / gcd(r_Q, l_Q)` dividing the torsion order `r`.
//! Five numerical restrictions cut the (finite) search space down:
//!
//! * R1: `sum (r_Q - 1/r_Q) < 24` on the quotient,
//! * R2: the same bound for the points forced on the cover,
//! * R3: some point has local order exactly `r` (a fixed point exists),
//! * R4: every twisted Euler characteristic `chi(-nK + i sigma)` differs
//!   from `chi(-nK)` by an integer,
//! * R5: `chi(i sigma) >= 0` (or `= 0` in strict mode).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{format_rational, gcd, int, is_integer, lcm, md, rat, Rational};
use crate::hilbert::torsion_delta_at;
use crate::orbifold::{
    preimage_singularity, terminal_sum, Fiber, MarkedBasket, MarkedSingularity, OrbifoldError,
    SingularityType,
};

pub const MAX_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("torsion order {0} outside [2, 24]")]
    OutOfRange(usize),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
    #[error("l = 0 at {0}: points with trivial marking do not belong to B_t")]
    TrivialMarking(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Require `chi(i sigma) = 0` instead of `>= 0` for `i != 0`.
    pub strict_r5: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BtCandidate {
    r: usize,
    entries: MarkedBasket,
}

impl BtCandidate {
    pub fn new(r: usize, entries: MarkedBasket) -> Result<Self, EnumerationError> {
        if !(2..=MAX_ORDER).contains(&r) {
            return Err(EnumerationError::OutOfRange(r));
        }
        for m in entries.items() {
            if m.l() == 0 {
                return Err(EnumerationError::TrivialMarking(m.to_string()));
            }
            preimage_singularity(*m, r as i64)?;
        }
        Ok(BtCandidate { r, entries })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn entries(&self) -> &MarkedBasket {
        &self.entries
    }

    pub fn is_canonical(&self) -> bool {
        canonicalize(self) == *self
    }
}

impl fmt::Display for BtCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} | {}", self.r, self.entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Restriction {
    R1,
    R2,
    R3,
    R4,
    R5,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub passed: bool,
    /// The value that was tested, or the first offending one.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    pub outcomes: BTreeMap<Restriction, Outcome>,
}

impl RestrictionReport {
    pub fn admissible(&self) -> bool {
        self.outcomes.values().all(|o| o.passed)
    }

    pub fn passed(&self, r: Restriction) -> bool {
        self.outcomes[&r].passed
    }
}

/// Terminal sum of the points forced on the cover by the marked points.
pub fn cover_terminal_sum(c: &BtCandidate) -> Result<Rational, OrbifoldError> {
    let mut total = Rational::from_integer(0.into());
    for m in c.entries.items() {
        if let (count, Fiber::Singular(t)) = preimage_singularity(*m, c.r as i64)? {
            total += (int(t.r()) - rat(1, t.r())) * int(count);
        }
    }
    Ok(total)
}

fn period(c: &BtCandidate) -> i64 {
    c.entries.items().fold(1, |p, m| lcm(p, m.ty().r()))
}

/// Evaluates R1–R5 with exact arithmetic.
pub fn check_restrictions(c: &BtCandidate, opts: EnumerationOptions) -> RestrictionReport {
    let mut outcomes = BTreeMap::new();
    let bound = int(24);

    let t1 = terminal_sum(&c.entries.unmarked());
    outcomes.insert(
        Restriction::R1,
        Outcome {
            passed: t1 < bound,
            value: format_rational(&t1),
        },
    );

    let r2 = match cover_terminal_sum(c) {
        Ok(t2) => Outcome {
            passed: t2 < bound,
            value: format_rational(&t2),
        },
        Err(e) => Outcome {
            passed: false,
            value: e.to_string(),
        },
    };
    outcomes.insert(Restriction::R2, r2);

    let witness = c.entries.items().find(|m| m.alpha() == c.r as i64);
    outcomes.insert(
        Restriction::R3,
        Outcome {
            passed: witness.is_some() && c.r <= MAX_ORDER,
            value: witness.map_or_else(
                || "no point of local order r".to_string(),
                |m| m.to_string(),
            ),
        },
    );

    let per = period(c);
    let mut r4 = Outcome {
        passed: true,
        value: format!("integral over one period ({per})"),
    };
    'outer: for i in 1..c.r as i64 {
        for n in 0..per {
            let d = torsion_delta_at(&c.entries, i, n);
            if !is_integer(&d) {
                r4 = Outcome {
                    passed: false,
                    value: format!("i={i} n={n} delta={}", format_rational(&d)),
                };
                break 'outer;
            }
        }
    }
    outcomes.insert(Restriction::R4, r4);

    let mut r5 = Outcome {
        passed: true,
        value: "chi(i sigma) ok".to_string(),
    };
    for i in 1..c.r as i64 {
        let chi = int(1) + torsion_delta_at(&c.entries, i, 0);
        let ok = if opts.strict_r5 {
            chi == int(0)
        } else {
            chi >= int(0)
        };
        if !ok {
            r5 = Outcome {
                passed: false,
                value: format!("chi({i} sigma)={}", format_rational(&chi)),
            };
            break;
        }
    }
    outcomes.insert(Restriction::R5, r5);

    RestrictionReport { outcomes }
}

/// Least representative of the candidate under `sigma -> u sigma`.
pub fn canonicalize(c: &BtCandidate) -> BtCandidate {
    let r = c.r as i64;
    let best = (1..r)
        .filter(|&u| gcd(u, r) == 1)
        .map(|u| c.entries.rescaled(u))
        .min_by(|a, b| a.to_vec().cmp(&b.to_vec()))
        .unwrap_or_else(|| c.entries.clone());
    BtCandidate {
        r: c.r,
        entries: best,
    }
}

/// Marked points admissible for torsion order `r`, in `(r_Q, a, l)` order.
pub fn marked_points(r: usize) -> Vec<MarkedSingularity> {
    let mut out = Vec::new();
    for rq in 2..=MAX_ORDER as i64 {
        for a in 1..=rq / 2 {
            if gcd(a, rq) != 1 {
                continue;
            }
            let t = SingularityType::new(rq, a).expect("coprime weight");
            for l in 1..rq {
                let m = MarkedSingularity::new(t, l).expect("l in range");
                if r as i64 % m.alpha() == 0 {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Integer tables for the search: all quantities scaled to a common
/// denominator so the inner loop avoids bignums. Agreement with the exact
/// checks is covered by tests.
struct Tables {
    r: usize,
    points: Vec<MarkedSingularity>,
    /// `(r_Q - 1/r_Q) * SUM_SCALE`
    tsum: Vec<i64>,
    cover: Vec<i64>,
    /// `delta[k][i][n]` for `n` in `0..r_Q`, scaled by `DELTA_SCALE`
    delta: Vec<Vec<Vec<i64>>>,
}

const SUM_SCALE: i64 = 5_354_228_880; // lcm(1..=24)
const DELTA_SCALE: i64 = 12 * SUM_SCALE;

fn scaled(x: &Rational, scale: i64) -> i64 {
    let v = x * int(scale);
    assert!(is_integer(&v), "scale does not clear denominator");
    i64::try_from(v.numer()).expect("fits in i64")
}

/// `c_Q(i) * DELTA_SCALE` for `i` in `0..r_Q`, by prefix sums.
fn scaled_cq(t: SingularityType) -> Vec<i64> {
    let (r, b) = (t.r(), t.inverse_weight());
    let unit = SUM_SCALE / r;
    let mut out = Vec::with_capacity(r as usize);
    let mut f_sum = 0;
    for i in 0..r {
        if i > 0 {
            let bj = md(b * (i - 1), r);
            f_sum += bj * (r - bj) * 6 * unit;
        }
        out.push(-i * (r * r - 1) * unit + f_sum);
    }
    out
}

impl Tables {
    fn new(r: usize) -> Self {
        // points of local order r first: every admissible basket contains
        // one, so only those need to open a branch
        let mut points = marked_points(r);
        points.sort_by_key(|m| m.alpha() != r as i64);
        let mut tsum = Vec::new();
        let mut cover = Vec::new();
        let mut delta = Vec::new();
        for m in &points {
            let t = m.ty();
            let rq = t.r();
            tsum.push(scaled(&(int(rq) - rat(1, rq)), SUM_SCALE));
            let c = match preimage_singularity(*m, r as i64).expect("admissible marking") {
                (count, Fiber::Singular(f)) => {
                    scaled(&((int(f.r()) - rat(1, f.r())) * int(count)), SUM_SCALE)
                }
                (_, Fiber::Smooth) => 0,
            };
            cover.push(c);
            let cq = scaled_cq(t);
            let rows = (0..r as i64)
                .map(|i| {
                    let lp = md(i * m.l(), rq);
                    (0..rq)
                        .map(|n| cq[md(lp - n, rq) as usize] - cq[md(-n, rq) as usize])
                        .collect()
                })
                .collect();
            delta.push(rows);
        }
        Tables {
            r,
            points,
            tsum,
            cover,
            delta,
        }
    }

    fn admissible(&self, chosen: &[usize], strict_r5: bool) -> bool {
        let r = self.r as i64;
        if !chosen.iter().any(|&k| self.points[k].alpha() == r) {
            return false;
        }
        let per = chosen
            .iter()
            .fold(1, |p, &k| lcm(p, self.points[k].ty().r()));
        for i in 1..self.r {
            let chi0 = DELTA_SCALE + chosen.iter().map(|&k| self.delta[k][i][0]).sum::<i64>();
            if chi0 < 0 || (strict_r5 && chi0 != 0) {
                return false;
            }
            for n in 0..per {
                let s: i64 = chosen
                    .iter()
                    .map(|&k| {
                        let rq = self.points[k].ty().r();
                        self.delta[k][i][(n % rq) as usize]
                    })
                    .sum();
                if s % DELTA_SCALE != 0 {
                    return false;
                }
            }
        }
        true
    }

    fn candidate(&self, chosen: &[usize]) -> BtCandidate {
        let entries = chosen.iter().map(|&k| self.points[k]).collect();
        BtCandidate { r: self.r, entries }
    }

    fn search(
        &self,
        start: usize,
        chosen: &mut Vec<usize>,
        s1: i64,
        s2: i64,
        opts: EnumerationOptions,
        out: &mut BTreeSet<BtCandidate>,
    ) {
        if !chosen.is_empty() && self.admissible(chosen, opts.strict_r5) {
            out.insert(canonicalize(&self.candidate(chosen)));
        }
        let bound = 24 * SUM_SCALE;
        for k in start..self.points.len() {
            let (n1, n2) = (s1 + self.tsum[k], s2 + self.cover[k]);
            if n1 >= bound || n2 >= bound {
                continue;
            }
            chosen.push(k);
            self.search(k, chosen, n1, n2, opts, out);
            chosen.pop();
        }
    }
}

/// All canonical admissible `B_t` for torsion order `r`, sorted.
pub fn enumerate_bt(
    r: usize,
    opts: EnumerationOptions,
) -> Result<Vec<BtCandidate>, EnumerationError> {
    if !(2..=MAX_ORDER).contains(&r) {
        return Err(EnumerationError::OutOfRange(r));
    }
    let tables = Tables::new(r);
    let bound = 24 * SUM_SCALE;
    let fixed = tables
        .points
        .iter()
        .take_while(|m| m.alpha() == r as i64)
        .count();
    let found: BTreeSet<BtCandidate> = (0..fixed)
        .into_par_iter()
        .map(|k| {
            let mut out = BTreeSet::new();
            if tables.tsum[k] < bound && tables.cover[k] < bound {
                let mut chosen = vec![k];
                tables.search(
                    k,
                    &mut chosen,
                    tables.tsum[k],
                    tables.cover[k],
                    opts,
                    &mut out,
                );
            }
            out
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(found.into_iter().collect())
}

/// `enumerate_bt` for every `r` in `2..=24`.
pub fn enumerate_all(opts: EnumerationOptions) -> Vec<(usize, Vec<BtCandidate>)> {
    (2..=MAX_ORDER)
        .into_par_iter()
        .map(|r| (r, enumerate_bt(r, opts).expect("r in range")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbifold::contribution_cq;

    fn m(r: i64, a: i64, l: i64) -> MarkedSingularity {
        SingularityType::new(r, a).unwrap().marked(l).unwrap()
    }

    fn cand(r: usize, pts: &[(i64, i64, i64)]) -> BtCandidate {
        BtCandidate::new(r, pts.iter().map(|&(q, a, l)| m(q, a, l)).collect()).unwrap()
    }

    #[test]
    fn listed_baskets_pass() {
        let c = cand(2, &[(2, 1, 1), (14, 1, 7)]);
        assert!(check_restrictions(&c, EnumerationOptions::default()).admissible());
        let c = cand(5, &[(5, 2, 1), (5, 2, 2), (5, 2, 3), (5, 2, 4)]);
        assert!(check_restrictions(&c, EnumerationOptions::default()).admissible());
    }

    #[test]
    fn single_half_point_fails() {
        let c = cand(2, &[(2, 1, 1)]);
        let rep = check_restrictions(&c, EnumerationOptions::default());
        assert!(!rep.passed(Restriction::R4));
        assert!(rep.outcomes[&Restriction::R4].value.contains("-1/8"));
        let strict = check_restrictions(&c, EnumerationOptions { strict_r5: true });
        assert!(!strict.passed(Restriction::R5));
    }

    #[test]
    fn canonical_forms() {
        let c = cand(5, &[(5, 2, 3), (5, 2, 3), (10, 3, 8)]);
        assert_eq!(
            canonicalize(&c),
            cand(5, &[(5, 2, 1), (5, 2, 1), (10, 3, 6)])
        );
        let d = canonicalize(&c);
        assert_eq!(canonicalize(&d), d);
        let e = cand(2, &[(2, 1, 1), (14, 1, 7)]);
        assert_eq!(canonicalize(&e), e);
    }

    #[test]
    fn out_of_range() {
        assert_eq!(
            enumerate_bt(1, EnumerationOptions::default()),
            Err(EnumerationError::OutOfRange(1))
        );
        assert_eq!(
            enumerate_bt(25, EnumerationOptions::default()),
            Err(EnumerationError::OutOfRange(25))
        );
    }

    #[test]
    fn order_eight() {
        let v = enumerate_bt(8, EnumerationOptions::default()).unwrap();
        assert_eq!(v, [cand(8, &[(2, 1, 1), (4, 1, 1), (8, 3, 3), (8, 3, 7)])]);
        assert_eq!(
            v[0].to_string(),
            "r=8 | 1/2(1,1,1)_1, 1/4(1,1,3)_1, 1/8(1,3,5)_3, 1/8(1,3,5)_7"
        );
    }

    #[test]
    fn scaled_contributions() {
        for (r, a) in [(2, 1), (5, 2), (7, 3), (24, 5)] {
            let t = SingularityType::new(r, a).unwrap();
            let cq = scaled_cq(t);
            for i in 0..r {
                assert_eq!(cq[i as usize], scaled(&contribution_cq(t, i), DELTA_SCALE));
            }
        }
    }

    #[test]
    fn integer_tables_agree_with_exact_checks() {
        // every node of a small search, fast path against exact restrictions
        for r in [3usize, 4, 5] {
            let tables = Tables::new(r);
            let mut chosen = Vec::new();
            let mut checked = 0;
            fn walk(
                t: &Tables,
                start: usize,
                chosen: &mut Vec<usize>,
                depth: usize,
                checked: &mut usize,
            ) {
                if !chosen.is_empty() {
                    let c = t.candidate(chosen);
                    let rep = check_restrictions(&c, EnumerationOptions::default());
                    let exact = rep.passed(Restriction::R3)
                        && rep.passed(Restriction::R4)
                        && rep.passed(Restriction::R5);
                    assert_eq!(t.admissible(chosen, false), exact, "{c}");
                    *checked += 1;
                }
                if depth == 0 {
                    return;
                }
                for k in start..t.points.len().min(start + 6) {
                    chosen.push(k);
                    walk(t, k, chosen, depth - 1, checked);
                    chosen.pop();
                }
            }
            walk(&tables, 0, &mut chosen, 3, &mut checked);
            assert!(checked > 20);
        }
    }
}
