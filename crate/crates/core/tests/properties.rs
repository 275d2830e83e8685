mod common;

use common::*;
use lagmatch::exterior::SpMatrix;
use proptest::prelude::*;

fn genus_and<S, F>(lo: usize, hi: usize, f: F) -> impl Strategy<Value = (usize, S::Value)>
where
    S: Strategy,
    F: Fn(usize) -> S + Clone,
{
    (lo..=hi).prop_flat_map(move |g| (Just(g), f(g)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn contract_is_a_graded_derivation(
        (g, (l, x, y)) in genus_and(1, 3, |g| (primitive(g), ext_terms(g), ext_terms(g)))
    ) {
        check_leibniz(g, &l, &x, &y)?;
    }

    #[test]
    fn contract_squares_to_zero(
        (g, (l, x)) in genus_and(1, 3, |g| (primitive(g), ext_terms(g)))
    ) {
        check_contract_squared(g, &l, &x)?;
    }

    #[test]
    fn down_after_up_vanishes(
        (g, (n, l)) in genus_and(1, 3, |g| (1u32..=3, primitive(g)))
    ) {
        check_down_up(g, n, &l)?;
    }

    #[test]
    fn down_map_commutes_with_u_and_theta(
        (g, (n, l, x)) in genus_and(1, 3, |g| (2u32..=4).prop_flat_map(move |n| {
            (Just(n), primitive(g), sym_terms(g, n))
        }))
    ) {
        check_down_equivariance(g, n, &l, &x)?;
    }

    #[test]
    fn supertrace_is_cyclic((blocks, a, b) in graded_pair()) {
        check_supertrace_cyclic(&blocks, &a, &b)?;
    }

    #[test]
    fn twist_supertrace_is_cyclic(
        (g, (n, a, b)) in genus_and(0, 2, |g| (0u32..=2, twist_word(g), twist_word(g)))
    ) {
        check_twist_cyclic(n, &symplectic(g, &a), &symplectic(g, &b))?;
    }

    #[test]
    fn sphere_u_action_has_period_n_plus_one(
        n in 0u32..=8,
        coeffs in prop::collection::vec(-5i64..=5, 9)
    ) {
        check_g0_period(n, &coeffs)?;
    }

    #[test]
    fn fibered_value_matches_both_oracles(
        (g, (n, w)) in genus_and(0, 2, |g| (0u32..=2, twist_word(g)))
    ) {
        check_fibered(&symplectic(g, &w), n)?;
    }

    #[test]
    fn fibered_value_is_conjugation_invariant(
        (g, (n, w, p)) in genus_and(0, 2, |g| (0u32..=2, twist_word(g), twist_word(g)))
    ) {
        check_conjugation(n, &symplectic(g, &w), &symplectic(g, &p))?;
    }

    #[test]
    fn adapted_basis_sends_circle_to_a1(
        (g, l) in genus_and(1, 3, primitive)
    ) {
        let v = vector(g, &l);
        let b = SpMatrix::adapted_basis(&v).unwrap();
        prop_assert_eq!(b.apply(&v).unwrap(), v.lattice().a(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cz_parity_matches_endpoint_sign((n, upper) in cz_inputs()) {
        check_cz_parity(n, &upper)?;
    }
}
