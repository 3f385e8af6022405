use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use closedwalk::lattice::{builtin, LatticeKind};
use closedwalk::numeric::{rational_to_f64, Factorials};
use closedwalk::oracle::{enumerate, finite_chain_trace};
use closedwalk::quadrature::{finite_chain_ksum, moment, required_grid};
use closedwalk::series::{self, MultiIndex};

fn kind() -> impl Strategy<Value = LatticeKind> {
    prop::sample::select(LatticeKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_are_nonnegative_walk_counts(kind in kind(), ring in 3usize..10, order in 0u32..9) {
        let spec = builtin(kind, Some(ring)).unwrap();
        let s = series::for_spec(&spec, order).unwrap();
        let f = Factorials::up_to(order as usize);
        for (idx, c) in s.iter() {
            prop_assert!(c.is_positive());
            prop_assert!(s.walk_count(idx, &f).is_some(), "{idx}: {c} times n! not integral");
        }
    }

    #[test]
    fn bipartite_lattices_have_only_even_orders(order in 0u32..16) {
        for s in [series::chain_infinite(order), series::honeycomb(order), series::diamond(order), series::bcc(order)] {
            for (idx, _) in s.iter() {
                prop_assert_eq!(idx.total() % 2, 0);
            }
        }
    }

    #[test]
    fn even_rings_have_only_even_orders(half in 2usize..8, order in 0u32..20) {
        let s = series::chain_finite(2 * half, order).unwrap();
        for (idx, _) in s.iter() {
            prop_assert_eq!(idx.total() % 2, 0);
        }
    }

    #[test]
    fn finite_ring_agrees_with_infinite_chain_below_ring_size(ring in 3usize..16) {
        let finite = series::chain_finite(ring, ring as u32 + 1).unwrap();
        let infinite = series::chain_infinite(ring as u32 + 1);
        for n in 0..ring as u32 {
            prop_assert_eq!(finite.order(n), infinite.order(n));
        }
        // Winding walks first appear at length ring.
        prop_assert!(finite.order(ring as u32) > infinite.order(ring as u32));
    }

    #[test]
    fn ring_formula_matches_trace(ring in 3usize..14, n in 0u32..16) {
        let f = Factorials::up_to(n as usize);
        prop_assert_eq!(series::chain_finite_count(ring, n, &f), finite_chain_trace(ring, n).unwrap().0);
    }

    #[test]
    fn ring_ksum_is_even_for_even_rings(half in 2usize..7, xi in -1.0f64..1.0) {
        let a = finite_chain_ksum(2 * half, xi).unwrap();
        let b = finite_chain_ksum(2 * half, -xi).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn series_evaluation_matches_ksum(ring in 3usize..12, xi in -1.0f64..1.0) {
        let s = series::chain_finite(ring, 30).unwrap();
        prop_assert!((s.evaluate(&[xi]) - finite_chain_ksum(ring, xi).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn quadrature_matches_exact_coefficients(kind in kind(), ring in 3usize..9, order in 0u32..8) {
        let spec = builtin(kind, Some(ring)).unwrap();
        let exact = series::for_spec(&spec, order).unwrap();
        let f = Factorials::up_to(order as usize);
        for idx in MultiIndex::all_up_to(spec.hopping_count, order).into_iter().filter(|i| i.total() == order) {
            let m = moment(&spec, &idx, required_grid(&spec, &idx).unwrap()).unwrap();
            let scale: BigUint = idx.exponents().iter().map(|&k| f.get(k as usize).clone()).product();
            let exact_moment = exact.coefficient(&idx) * BigRational::from_integer(BigInt::from(scale));
            let want = rational_to_f64(&exact_moment);
            let tol = if exact_moment.is_zero() { 1e-9 } else { 1e-9 * want.abs() };
            prop_assert!((m.value - want).abs() <= tol, "{kind} {idx}: {} vs {want}", m.value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_total_matches_exact_order(kind in kind(), ring in 3usize..8, n in 0u32..7) {
        let spec = builtin(kind, Some(ring)).unwrap();
        let s = series::for_spec(&spec, n).unwrap();
        let f = Factorials::up_to(n as usize);
        let tally = enumerate(&spec, n).unwrap();
        let mut total = BigUint::zero();
        for (idx, _) in s.iter().filter(|(i, _)| i.total() == n) {
            total += s.walk_count(idx, &f).unwrap().0;
        }
        prop_assert_eq!(tally.total(), total);
    }
}

