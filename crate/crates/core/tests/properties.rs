mod common;

use common::oracle;
use gradedq::derivations::Derivation;
use gradedq::dsl::{chart_dsl, field_dsl, parse};
use gradedq::graded_core::{GradedContext, GradedPolynomial, Rat};
use gradedq::ideal::IdealReducer;
use gradedq::koszul_tate::{kt_build, kt_verify};
use gradedq::random::{random_derivation, random_polynomial, random_unit_curvature_q, rng};
use proptest::prelude::*;

fn sign(a: i32, b: i32) -> Rat {
    Rat::from_integer(if a * b % 2 == 0 { 1 } else { -1 }.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_q_round_trips(seed in 0u64..10_000) {
        let q = random_unit_curvature_q(&mut rng(seed), 3, 3);
        let text = format!("{}{}", chart_dsl(q.q().ctx()), field_dsl("Q", q.q()));
        let spec = parse(&text).unwrap();
        prop_assert_eq!(&spec.fields["Q"], q.q());
        let again = parse(&spec.to_string()).unwrap();
        prop_assert_eq!(again, spec);
    }

    #[test]
    fn products_are_graded_commutative(seed in 0u64..10_000, da in -2i32..3, db in -2i32..3) {
        let ctx = GradedContext::from_pairs(&[("x", 0), ("xi", -1), ("zeta", -2), ("theta", 1), ("omega", 2)], 3, 4).unwrap();
        let mut r = rng(seed);
        let a = random_polynomial(&mut r, &ctx, da, 3);
        let b = random_polynomial(&mut r, &ctx, db, 3);
        let ab = &a * &b;
        let ba = (&b * &a).scale(&sign(da, db));
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn commutator_is_graded_antisymmetric(seed in 0u64..10_000, dx in -1i32..2, dy in -1i32..2) {
        let ctx = GradedContext::from_pairs(&[("x", 0), ("xi", -1), ("theta", 1)], 3, 3).unwrap();
        let mut r = rng(seed);
        let x: Derivation = random_derivation(&mut r, &ctx, dx, 2);
        let y = random_derivation(&mut r, &ctx, dy, 2);
        let xy = x.commutator(&y).unwrap();
        let yx = y.commutator(&x).unwrap().scale(&-sign(dx, dy));
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn monomial_ideals_match_the_oracle(exps in prop::collection::vec((0u32..3, 0u32..3), 1..3)) {
        let base = GradedContext::from_pairs(&[("x", 0), ("y", 0)], 4, 1).unwrap();
        let x = GradedPolynomial::var(&base, 0);
        let y = GradedPolynomial::var(&base, 1);
        let gens: Vec<GradedPolynomial> = exps
            .iter()
            .filter(|(a, b)| a + b > 0)
            .map(|&(a, b)| &x.pow(a) * &y.pow(b))
            .collect();
        prop_assume!(!gens.is_empty());
        let q = oracle::quotient_dimension(&base, &gens);
        prop_assert_eq!(IdealReducer::new(&base, &gens).quotient_dimension(), q);
        let kt = kt_build(&gens, 2).unwrap();
        prop_assert_eq!(kt_verify(&kt).unwrap().h0, q);
    }
}
