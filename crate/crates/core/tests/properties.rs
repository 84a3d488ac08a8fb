//! Property tests for the algebraic identities the whole tower rests on.

use proptest::prelude::*;

use tdeg_core::exact::{Poly, Rat};
use tdeg_core::fst::{Fst, FstBuilder};
use tdeg_core::stream::{verify_transduction, StreamSpec, Verification};
use tdeg_core::weight::{compose_single, single_product_poly, Weight, WeightTuple};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-200i64..=200, 1i64..=20).prop_map(|(p, q)| Rat::ratio(p, q))
}

fn arb_nonneg_rat() -> impl Strategy<Value = Rat> {
    (0i64..=9, 1i64..=9).prop_map(|(p, q)| Rat::ratio(p, q))
}

fn arb_poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(arb_rat(), 0..=5).prop_map(Poly::new)
}

fn arb_weight(max_entries: usize) -> impl Strategy<Value = Weight> {
    (
        proptest::collection::vec(arb_nonneg_rat(), 1..=max_entries),
        arb_nonneg_rat(),
    )
        .prop_map(|(entries, constant)| Weight::new(entries, constant).unwrap())
}

fn arb_fst(max_states: usize) -> impl Strategy<Value = Fst> {
    (1..=max_states)
        .prop_flat_map(|n| {
            proptest::collection::vec(
                ((0..n), proptest::collection::vec(0u8..2, 0..=3)),
                2 * n,
            )
            .prop_map(move |transitions| {
                let mut b = FstBuilder::new();
                let states: Vec<usize> = (0..n).map(|i| b.state(&format!("s{i}"))).collect();
                for (slot, (next, out)) in transitions.iter().enumerate() {
                    b.transition(states[slot / 2], (slot % 2) as u8, states[*next], out);
                }
                b.build(states[0])
            })
        })
}

fn arb_word() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..2, 0..=64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    // --- polynomial algebra ------------------------------------------

    #[test]
    fn shift_composes(p in arb_poly(), k1 in -8i64..=8, k2 in -8i64..=8) {
        prop_assert_eq!(p.shift(k1).shift(k2), p.shift(k1 + k2));
    }

    #[test]
    fn shift_evaluates_as_translation(p in arb_poly(), k in -8i64..=8, n in -10i64..=10) {
        prop_assert_eq!(p.shift(k).eval_int(n), p.eval_int(n + k));
    }

    #[test]
    fn affine_with_unit_scale_is_shift(p in arb_poly(), b in -8i64..=8) {
        prop_assert_eq!(p.affine(&Rat::one(), &Rat::from_int(b)), p.shift(b));
    }

    #[test]
    fn integer_valued_agrees_with_sampling(p in arb_poly()) {
        // the binomial-basis decision and direct evaluation never disagree
        // on the sampled range
        let claimed = p.is_integer_valued();
        let samples_integer =
            (0..=(p.degree().max(0) + 1)).all(|n| p.eval_int(n).is_integer());
        if claimed {
            prop_assert!(samples_integer);
        } else {
            // integer-valuedness of degree-d polynomials is decided by any
            // d+1 consecutive integer values
            prop_assert!(!samples_integer);
        }
    }

    // --- machines ----------------------------------------------------

    #[test]
    fn runs_preserve_prefixes(t in arb_fst(6), w in arb_word(), cut in 0usize..=64) {
        let cut = cut.min(w.len());
        let on_prefix = t.run(&w[..cut]);
        let on_word = t.run(&w);
        prop_assert_eq!(&on_word[..on_prefix.len()], &on_prefix[..]);
    }

    #[test]
    fn composition_runs_in_sequence(
        t1 in arb_fst(6),
        t2 in arb_fst(6),
        w in arb_word(),
    ) {
        let composed = t1.compose(&t2);
        prop_assert_eq!(composed.run(&w), t2.run(&t1.run(&w)));
    }

    #[test]
    fn scale_down_undoes_scale_up_on_every_word(a in 1usize..=5, w in arb_word()) {
        let up = Fst::scale_up(a).unwrap();
        let down = Fst::scale_down(a).unwrap();
        prop_assert_eq!(up.compose(&down).run(&w), w);
    }

    // --- weight algebra ----------------------------------------------

    #[test]
    fn single_tuple_values_match_closed_form(alpha in arb_weight(5), coeffs in proptest::collection::vec(-20i64..=20, 1..=4)) {
        let f = Poly::from_ints(&coeffs);
        let poly = single_product_poly(&alpha, &f);
        let vals = WeightTuple::single(alpha).product_values(&f, 16);
        for (n, v) in vals.iter().enumerate() {
            prop_assert_eq!(v.clone(), poly.eval_int(n as i64));
        }
    }

    #[test]
    fn naturalization_scales_values(
        ws in proptest::collection::vec(arb_weight(3), 1..=3),
        coeffs in proptest::collection::vec(-9i64..=9, 1..=4),
    ) {
        let tuple = WeightTuple::new(ws).unwrap();
        let f = Poly::from_ints(&coeffs);
        let (nat, scale) = tuple.naturalized();
        let s = Rat::from_bigint(scale);
        let orig = tuple.product_values(&f, 8);
        let scaled = nat.product_values(&f, 8);
        for (o, n) in orig.iter().zip(&scaled) {
            prop_assert_eq!(n.clone(), o * &s);
        }
    }

    #[test]
    fn composition_is_associative_and_multiplies_m_degree(
        a in arb_weight(3),
        b in arb_weight(3),
        c in arb_weight(3),
    ) {
        let left = compose_single(&compose_single(&c, &b), &a);
        let right = compose_single(&c, &compose_single(&b, &a));
        prop_assert_eq!(&left, &right);
        let ba = compose_single(&b, &a);
        prop_assert_eq!(ba.m_degree(), a.m_degree() * b.m_degree());
    }

    #[test]
    fn composition_realizes_nested_products(
        a in arb_weight(3),
        b in arb_weight(3),
        coeffs in proptest::collection::vec(-9i64..=9, 1..=4),
    ) {
        let f = Poly::from_ints(&coeffs);
        let nested = single_product_poly(&b, &single_product_poly(&a, &f));
        let composed = single_product_poly(&compose_single(&b, &a), &f);
        prop_assert_eq!(nested, composed);
    }

    #[test]
    fn one_transform_products_of_the_cube_stay_cubic(alpha in arb_weight(5)) {
        prop_assume!(alpha.m_degree() >= 1);
        let product = single_product_poly(&alpha, &Poly::monomial(3));
        prop_assert_eq!(product.degree(), 3);
        prop_assert!(product.leading_coeff().is_positive());
    }

    // --- weight machines against stream replay ------------------------

    #[test]
    fn weight_machines_realize_products(
        entries in proptest::collection::vec(0i64..=4, 1..=5),
        constant in 0i64..=4,
        skip in 0u64..=3,
    ) {
        let alpha = Weight::from_ints(&entries, constant);
        let f = Poly::monomial(3);
        let machine = Fst::from_weight(&alpha, skip as usize).unwrap();
        let source = StreamSpec::new(f.clone()).unwrap();
        let shifted = f.shift(skip as i64);
        let target = StreamSpec::new(single_product_poly(&alpha, &shifted)).unwrap();
        prop_assert_eq!(
            verify_transduction(&machine, &source, &target, 12).unwrap(),
            Verification::Ok
        );
    }
}
