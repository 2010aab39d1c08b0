//! Property tests against independent oracles.

mod common;

use fano_enriques::catalog::{bundled_catalog, catalog_to_json, parse_catalog};
use fano_enriques::enumeration::{
    canonicalize, check_restrictions, BtCandidate, EnumerationOptions,
};
use fano_enriques::exact::{int, is_even_integer, lcm};
use fano_enriques::gradedrings::{
    infer_presentation, linear_cone_pairs, presentation_series, Status,
};
use fano_enriques::hilbert::{parity_holds, torsion_delta_at, torsion_delta_series, FanoData};
use fano_enriques::orbifold::{contribution_cq, normalize_type, Fiber, SingularityType};
use fano_enriques::quotient::match_cover;
use fano_enriques::series::{Bidegree, BigradedSeries};
use num_integer::Integer;
use proptest::prelude::*;

use common::*;

fn units(r: i64) -> impl Strategy<Value = i64> {
    (1..r.max(2)).prop_filter("unit", move |u| u.gcd(&r) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_is_idempotent_and_invariant((t, u) in sing_type(24).prop_flat_map(|t| (Just(t), units(t.r()))), perm in 0..6usize) {
        let r = t.r();
        let [x, y, z] = t.exponents();
        let orders = [[x, y, z], [x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]];
        let scaled = orders[perm].map(|e| (e * u).rem_euclid(r));
        prop_assert_eq!(normalize_type(r, scaled).unwrap(), Fiber::Singular(t));
        prop_assert_eq!(normalize_type(r, t.exponents()).unwrap(), Fiber::Singular(t));
    }

    #[test]
    fn normalize_divides_out_common_factors(t in sing_type(12), g in 2..5i64) {
        let e = t.exponents().map(|x| x * g);
        prop_assert_eq!(normalize_type(t.r() * g, e).unwrap(), Fiber::Singular(t));
    }

    #[test]
    fn cq_matches_definition_and_is_periodic(t in sing_type(24), i in -60..60i64) {
        prop_assert_eq!(contribution_cq(t, i), naive_cq(t, i));
        prop_assert_eq!(contribution_cq(t, i + t.r()), contribution_cq(t, i));
    }

    #[test]
    fn delta_closed_form_matches_pointwise(bt in marked_basket(9, 3), i in 0..6i64) {
        let period = bt.items().fold(1, |p, m| lcm(p, m.ty().r()));
        let trunc = (2 * period) as usize;
        let i = i % period;
        let s = torsion_delta_series(&bt, i, trunc).unwrap();
        for n in 0..=trunc {
            prop_assert_eq!(torsion_delta_at(&bt, i, n as i64), naive_delta(&bt, i, n as i64));
            prop_assert_eq!(s.coeff(0, n), &naive_delta(&bt, i, n as i64));
        }
    }

    #[test]
    fn fano_data_accepts_exactly_the_parity_lattice(k3 in positive_rational(), basket in type_basket(11, 4), shift in any::<bool>()) {
        let k3 = if shift { k3.clone() - naive_parity_defect(&k3, &basket).fract() } else { k3 };
        prop_assume!(k3 > int(0));
        let even = is_even_integer(&naive_parity_defect(&k3, &basket));
        prop_assert_eq!(parity_holds(&k3, &basket), even);
        prop_assert_eq!(FanoData::new(k3, basket).is_ok(), even);
    }

    #[test]
    fn series_peel_then_unpeel_is_identity(coeffs in prop::collection::vec(-50..50i64, 1..16), n in 1..6usize, i in 0..4usize, r in 1..5usize) {
        let trunc = coeffs.len() - 1;
        let mut s = BigradedSeries::zero(r, trunc);
        for (m, c) in coeffs.iter().enumerate() {
            s.set(m % r, m, int(*c));
        }
        let d = Bidegree::new(n, i % r);
        let mut p = s.clone();
        p.peel_in_place(d);
        p.unpeel_in_place(d).unwrap();
        prop_assert_eq!(p, s);
    }

    #[test]
    fn inference_round_trips(p in small_presentation()) {
        let s = presentation_series(&p.generators, &p.relations, p.r, 12).unwrap();
        let got = infer_presentation(&s, 24).unwrap();
        let cancelled = linear_cone_pairs(&p.generators, &p.relations);
        let mut gens = p.generators.clone();
        let mut rels = p.relations.clone();
        for c in &cancelled {
            gens.remove(gens.iter().position(|g| g == c).unwrap());
            rels.remove(rels.iter().position(|g| g == c).unwrap());
        }
        gens.sort();
        rels.sort();
        prop_assert_eq!(&got.generators, &gens);
        prop_assert_eq!(&got.relations, &rels);
        let shared = rels.iter().any(|r| gens.iter().any(|g| g.n == r.n));
        prop_assert_eq!(got.status == Status::Special, shared);
    }

    #[test]
    fn generator_degrees_invariant_under_rescaling(p in small_presentation(), u in 1..8usize) {
        let r = p.r;
        prop_assume!(u.gcd(&r) == 1);
        let scale = |v: &[Bidegree]| v.iter().map(|d| Bidegree::new(d.n, d.i * u % r)).collect::<Vec<_>>();
        let a = infer_presentation(&presentation_series(&p.generators, &p.relations, r, 12).unwrap(), 24).unwrap();
        let b = infer_presentation(&presentation_series(&scale(&p.generators), &scale(&p.relations), r, 12).unwrap(), 24).unwrap();
        prop_assert_eq!(a.generator_degrees(), b.generator_degrees());
        prop_assert_eq!(a.relation_degrees(), b.relation_degrees());
        prop_assert_eq!(a.status, b.status);
    }

    #[test]
    fn canonicalize_is_idempotent_and_preserves_admissibility(bt in marked_basket(8, 4), r in prop::sample::select(vec![2usize, 3, 4, 6, 8, 12])) {
        let Ok(c) = BtCandidate::new(r, bt) else { return Ok(()) };
        let k = canonicalize(&c);
        prop_assert!(k.is_canonical());
        prop_assert_eq!(canonicalize(&k).clone(), k.clone());
        let opts = EnumerationOptions::default();
        prop_assert_eq!(check_restrictions(&c, opts).admissible(), check_restrictions(&k, opts).admissible());
    }

    #[test]
    fn matching_never_accepts_a_parity_failure(idx in 0..95usize, bt in marked_basket(8, 3), r in prop::sample::select(vec![2usize, 3, 4, 6])) {
        let covers = bundled_catalog("codim1").unwrap();
        let y = &covers[idx];
        if let Ok(data) = match_cover(y, &bt, r) {
            prop_assert!(parity_holds(data.minus_k3(), &data.fano_data().basket().clone()));
            prop_assert_eq!(data.minus_k3().clone(), y.minus_k3.clone() / int(r as i64));
        }
    }

    #[test]
    fn catalog_subsets_round_trip(picks in prop::collection::btree_set(0..32usize, 1..8)) {
        let all = bundled_catalog("codim2").unwrap();
        let subset: Vec<_> = picks.into_iter().map(|k| all[k].clone()).collect();
        prop_assert_eq!(parse_catalog(&catalog_to_json(&subset)).unwrap(), subset);
    }
}

#[test]
fn singularity_parsing_round_trips() {
    for r in 2..=24 {
        for a in 1..=r / 2 {
            if let Ok(t) = SingularityType::new(r, a) {
                assert_eq!(t.to_string().parse::<SingularityType>().unwrap(), t);
            }
        }
    }
}
