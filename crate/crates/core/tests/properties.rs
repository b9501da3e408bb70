use std::collections::BTreeMap;

use kernel_roots::convex::{generic_count_of, mixed_volume_polytopes, LatticePolytope};
use kernel_roots::expectation::{density, QuadratureConfig};
use kernel_roots::scalar::big_rational;
use kernel_roots::{ExactSpace, Space};
use proptest::prelude::*;

fn space_strategy(n: usize, max_terms: usize) -> impl Strategy<Value = Space> {
    prop::collection::btree_map(
        prop::collection::vec(-3i64..=3, n),
        0.1f64..10.0,
        1..=max_terms,
    )
    .prop_map(move |terms| Space::new(n, terms).unwrap())
}

fn exact_space_strategy(n: usize, max_terms: usize) -> impl Strategy<Value = ExactSpace> {
    prop::collection::btree_map(
        prop::collection::vec(-3i64..=3, n),
        1i64..=20,
        1..=max_terms,
    )
    .prop_map(move |terms| {
        ExactSpace::new(n, terms.into_iter().map(|(e, c)| (e, big_rational(c)))).unwrap()
    })
}

fn triple(max_terms: usize) -> impl Strategy<Value = (Space, Space, Space)> {
    (1usize..=3).prop_flat_map(move |n| {
        (
            space_strategy(n, max_terms),
            space_strategy(n, max_terms),
            space_strategy(n, max_terms),
        )
    })
}

fn assert_close(a: &Space, b: &Space, rel: f64) -> Result<(), TestCaseError> {
    let ta: BTreeMap<_, _> = a.terms().collect();
    let tb: BTreeMap<_, _> = b.terms().collect();
    prop_assert_eq!(ta.len(), tb.len());
    for (e, &&ca) in &ta {
        let cb = **tb
            .get(e)
            .ok_or_else(|| TestCaseError::fail(format!("missing exponent {e:?}")))?;
        prop_assert!(
            (ca - cb).abs() <= rel * ca.abs().max(cb.abs()),
            "{e:?}: {ca} vs {cb}"
        );
    }
    Ok(())
}

fn polygon() -> impl Strategy<Value = LatticePolytope> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 3..=6).prop_filter_map(
        "full-dimensional",
        |pts| {
            let p = LatticePolytope::hull_of(2, &pts).ok()?;
            (p.vertices().len() >= 3).then_some(p)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_associative((a, b, c) in triple(6)) {
        assert_close(&a.product(&b).unwrap(), &b.product(&a).unwrap(), 1e-12)?;
        let left = a.product(&b).unwrap().product(&c).unwrap();
        let right = a.product(&b.product(&c).unwrap()).unwrap();
        assert_close(&left, &right, 1e-12)?;
    }

    #[test]
    fn exact_product_is_commutative_and_associative(
        (a, b, c) in (1usize..=2).prop_flat_map(|n| (exact_space_strategy(n, 4), exact_space_strategy(n, 4), exact_space_strategy(n, 4)))
    ) {
        prop_assert_eq!(a.product(&b).unwrap(), b.product(&a).unwrap());
        prop_assert_eq!(a.product(&b).unwrap().product(&c).unwrap(), a.product(&b.product(&c).unwrap()).unwrap());
    }

    #[test]
    fn powers_add((s, d1, d2) in ((1usize..=3).prop_flat_map(|n| space_strategy(n, 4)), 1u32..=3, 1u32..=3)) {
        let lhs = s.power(d1 + d2).unwrap();
        let rhs = s.power(d1).unwrap().product(&s.power(d2).unwrap()).unwrap();
        assert_close(&lhs, &rhs, 1e-12)?;
    }

    #[test]
    fn total_weight_is_multiplicative((a, b, _) in triple(6)) {
        let lhs = a.product(&b).unwrap().total_weight();
        let rhs = a.total_weight() * b.total_weight();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn hull_of_power_is_dilated_hull((s, d) in ((1usize..=3).prop_flat_map(|n| space_strategy(n, 5)), 1u32..=4)) {
        let lifted = s.power(d).unwrap().support_hull().unwrap();
        let dilated = s.support_hull().unwrap().dilate(d as i64);
        prop_assert_eq!(lifted, dilated);
    }

    #[test]
    fn density_ignores_support_translation(
        (a, b, shift, x) in (space_strategy(2, 5), space_strategy(2, 5), prop::collection::vec(-4i64..=4, 2), prop::collection::vec(-2.0f64..2.0, 2))
    ) {
        let cfg = QuadratureConfig::default();
        let moved = a.shifted(&shift, 2.5).unwrap();
        let d0 = density(&[a, b.clone()], &x, &cfg).unwrap();
        let d1 = density(&[moved, b], &x, &cfg).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-10);
    }

    #[test]
    fn generic_count_is_multiplicative_in_dilations((p, q, d1, d2) in (polygon(), polygon(), 1i64..=3, 1i64..=3)) {
        let base = generic_count_of(&[p.clone(), q.clone()]).unwrap();
        let scaled = generic_count_of(&[p.dilate(d1).unwrap(), q.dilate(d2).unwrap()]).unwrap();
        prop_assert_eq!(scaled, (d1 * d2) as i128 * base);
    }

    #[test]
    fn mixed_area_is_symmetric_and_diagonal_is_area((p, q) in (polygon(), polygon())) {
        prop_assert_eq!(mixed_volume_polytopes(&[p.clone(), q.clone()]).unwrap(), mixed_volume_polytopes(&[q, p.clone()]).unwrap());
        prop_assert_eq!(mixed_volume_polytopes(&[p.clone(), p.clone()]).unwrap(), p.volume());
    }
}
