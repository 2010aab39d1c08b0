//! Strategies and independent oracles shared by the integration tests.
#![allow(dead_code)]

use fano_enriques::exact::{int, rat, Rational};
use fano_enriques::orbifold::{MarkedBasket, MarkedSingularity, SingularityType, TypeBasket};
use fano_enriques::series::Bidegree;
use num_integer::Integer;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn sing_type(max_r: i64) -> impl Strategy<Value = SingularityType> {
    (2..=max_r, 1..=12i64).prop_filter_map("a coprime to r", |(r, a)| {
        let a = (a - 1) % (r / 2) + 1;
        (a.gcd(&r) == 1).then(|| SingularityType::new(r, a).unwrap())
    })
}

pub fn marked(max_r: i64) -> impl Strategy<Value = MarkedSingularity> {
    (sing_type(max_r), 1..24i64).prop_map(|(t, l)| t.marked((l - 1) % (t.r() - 1) + 1).unwrap())
}

pub fn marked_basket(max_r: i64, max_len: usize) -> impl Strategy<Value = MarkedBasket> {
    prop::collection::vec(marked(max_r), 1..=max_len).prop_map(|v| v.into_iter().collect())
}

pub fn type_basket(max_r: i64, max_len: usize) -> impl Strategy<Value = TypeBasket> {
    prop::collection::vec(sing_type(max_r), 0..=max_len).prop_map(|v| v.into_iter().collect())
}

pub fn positive_rational() -> impl Strategy<Value = Rational> {
    (1..=240i64, 1..=60i64).prop_map(|(p, q)| rat(p, q))
}

/// A small presentation: generators up to degree 8, relations no lower
/// than the top generator, `codim` relations.
#[derive(Debug, Clone)]
pub struct SmallPresentation {
    pub r: usize,
    pub generators: Vec<Bidegree>,
    pub relations: Vec<Bidegree>,
}

pub fn small_presentation() -> impl Strategy<Value = SmallPresentation> {
    (2..=8usize, 1..=2usize)
        .prop_flat_map(|(r, codim)| {
            (
                Just(r),
                prop::collection::vec((1..=8usize, 0..r), 4 + codim),
                prop::collection::vec((0..=8usize, 0..r), codim),
            )
        })
        .prop_map(|(r, gens, rels)| {
            let top = gens.iter().map(|g| g.0).max().unwrap();
            let generators = gens.into_iter().map(|(n, i)| Bidegree::new(n, i)).collect();
            let relations = rels
                .into_iter()
                .map(|(k, i)| Bidegree::new(top + k % (9 - top), i))
                .collect();
            SmallPresentation {
                r,
                generators,
                relations,
            }
        })
}

/// Deterministic sampling outside the proptest harness.
pub struct Sampler(TestRunner);

impl Sampler {
    pub fn new() -> Self {
        Sampler(TestRunner::new_with_rng(
            Config::default(),
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        ))
    }

    pub fn sample<S: Strategy>(&mut self, s: &S) -> S::Value {
        s.new_tree(&mut self.0)
            .expect("strategy produces values")
            .current()
    }
}

/// Inverse of `a` mod `r` by search.
pub fn naive_inverse(a: i64, r: i64) -> i64 {
    (1..r).find(|b| (a * b).rem_euclid(r) == 1).expect("unit")
}

/// `-K^3 - sum b(r-b)/r`, an even integer exactly when the data can be Fano.
pub fn naive_parity_defect(k3: &Rational, basket: &TypeBasket) -> Rational {
    let mut d = k3.clone();
    for t in basket.items() {
        let b = naive_inverse(t.a(), t.r());
        d -= rat(b * (t.r() - b), t.r());
    }
    d
}

/// `c_Q(i)` straight from the definition, for `i` reduced mod `r`.
pub fn naive_cq(t: SingularityType, i: i64) -> Rational {
    let r = t.r();
    let b = naive_inverse(t.a(), r);
    let i = i.rem_euclid(r);
    let mut v = rat(-i * (r * r - 1), 12 * r);
    for j in 1..i {
        let x = (b * j).rem_euclid(r);
        v += rat(x * (r - x), 2 * r);
    }
    v
}

/// Pointwise `chi(-nK + i sigma) - chi(-nK)`.
pub fn naive_delta(bt: &MarkedBasket, i: i64, n: i64) -> Rational {
    let mut v = int(0);
    for m in bt.items() {
        let t = m.ty();
        let lp = (i * m.l()).rem_euclid(t.r());
        v += naive_cq(t, lp - n) - naive_cq(t, -n);
    }
    v
}
