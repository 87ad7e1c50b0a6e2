use std::sync::Arc;

use super::*;
use crate::algebra::{free_graded_commutative, poly_weight_capped, truncated_poly, Generator, GroupActionOnAlgebra};
use crate::field::{PrimeField, Rationals};
use crate::simplicial::{klein_bottle, point, sphere, FiniteGroup, TwistingFunction};

fn exterior() -> crate::algebra::StructureConstantAlgebra<Rationals> {
    free_graded_commutative(Rationals, &[Generator::new("ex", 1, 1)], 1, 1).unwrap()
}

fn twisted_exterior(n: usize) -> LodaySpec<Rationals> {
    let s1 = Arc::new(sphere(1, n).unwrap());
    let a = exterior();
    let g = FiniteGroup::cyclic(2);
    let tau = TwistingFunction::from_edges(&s1, g.clone(), |_| 1).unwrap();
    let act = GroupActionOnAlgebra::scaling_generators(&a, g, &[Rationals.from_i64(-1)]).unwrap();
    LodaySpec::new(s1, a)
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_twist(tau, act)
}

#[test]
fn circle_polynomial_enumeration() {
    let s1 = Arc::new(sphere(1, 3).unwrap());
    let c = LodaySpec::new(s1, poly_weight_capped(Rationals, 1))
        .with_degree_budget(1)
        .with_weight_budget(1)
        .build()
        .unwrap();
    let one = c.enumerate_basis(1, 1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(c.format_monomial(1, &one[0]), "t@s1");
    assert!(c.enumerate_basis(2, 1).unwrap().is_empty());
}

#[test]
fn circle_polynomial_is_bar_construction() {
    // Tor over k[t] of k with itself: k in (0,0) and (1,1)
    let s1 = Arc::new(sphere(1, 6).unwrap());
    let c = LodaySpec::new(s1, poly_weight_capped(Rationals, 4))
        .with_degree_budget(4)
        .with_weight_budget(4)
        .build()
        .unwrap();
    let h = c.homology().unwrap();
    for d in 0..=4 {
        for w in 0..=4 {
            let expected = usize::from((d, w) == (0, 0) || (d, w) == (1, 1));
            assert_eq!(h.get(d, w), expected, "H_{d} weight {w}");
        }
    }
}

#[test]
fn circle_polynomial_hochschild() {
    let s1 = Arc::new(sphere(1, 5).unwrap());
    let c = LodaySpec::new(s1, poly_weight_capped(Rationals, 3))
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_degree_budget(3)
        .with_weight_budget(3)
        .build()
        .unwrap();
    let h = c.homology().unwrap();
    for w in 0..=3 {
        assert_eq!(h.get(0, w), 1);
        assert_eq!(h.get(1, w), usize::from(w >= 1));
        assert_eq!(h.get(2, w), 0);
        assert_eq!(h.get(3, w), 0);
    }
}

#[test]
fn point_gives_coefficients() {
    let a = truncated_poly(Rationals, 3).unwrap();
    let c = LodaySpec::new(Arc::new(point(3)), a.clone())
        .with_coefficients(Coefficients::SameAsAlgebra)
        .build()
        .unwrap();
    let h = c.homology().unwrap();
    assert_eq!(h.by_degree(), vec![3, 0, 0]);
    let aug = LodaySpec::new(Arc::new(point(3)), a).build().unwrap();
    assert_eq!(aug.homology().unwrap().by_degree(), vec![1, 0, 0]);
}

#[test]
fn exterior_twisted_differential() {
    let spec = twisted_exterior(6).with_degree_budget(5);
    let c = spec.build().unwrap();
    let ex = 1u32;
    for k in 1..=4usize {
        let space = c.space();
        let base = space.basepoint(k);
        let m = Monomial((0..space.level_size(k) as u32).filter(|&x| x != base).map(|x| (x, ex)).collect());
        assert!(c.is_normalized_monomial(k, &m));
        let target = Monomial((0..space.level_size(k - 1) as u32).map(|x| (x, ex)).collect());
        assert_eq!(c.differential_of(k, &m).unwrap(), vec![(target, Rationals.from_i64(-2))], "k = {k}");
    }
}

#[test]
fn exterior_twisted_two_monomials_per_level() {
    let c = twisted_exterior(6).with_degree_budget(5).build().unwrap();
    for p in 1..=2 {
        let count: usize = c
            .block_dims()
            .unwrap()
            .iter()
            .filter(|((pp, q, _), _)| *pp == p && *q as usize >= p)
            .map(|(_, n)| n)
            .sum();
        assert_eq!(count, 2, "level {p}");
    }
}

#[test]
fn exterior_twisted_homology_is_ground_field() {
    let c = twisted_exterior(6).with_degree_budget(5).build().unwrap();
    assert_eq!(c.homology().unwrap().by_degree(), vec![1, 0, 0, 0, 0, 0]);
}

#[test]
fn nilpotent_circle_squares_to_zero() {
    let s1 = Arc::new(sphere(1, 4).unwrap());
    let c = LodaySpec::new(s1, truncated_poly(Rationals, 2).unwrap())
        .with_degree_budget(2)
        .build()
        .unwrap();
    for (q, w) in c.all_strand_keys().unwrap() {
        c.strand(q, w).unwrap();
    }
    assert!(c.chain_dims().unwrap().values().all(|&n| n < 100));
}

#[test]
fn moore_complex_agrees() {
    for n in [1, 2] {
        let s = Arc::new(sphere(n, 3).unwrap());
        let spec = LodaySpec::new(s, truncated_poly(Rationals, 2).unwrap()).with_degree_budget(2);
        assert!(compare_full_vs_normalized(&spec, 100_000).unwrap());
    }
    let spec = twisted_exterior(3).with_degree_budget(2);
    assert!(compare_full_vs_normalized(&spec, 100_000).unwrap());
}

#[test]
fn klein_bottle_fiberwise_matches_direct() {
    let f3 = PrimeField::new(3).unwrap();
    let a = poly_weight_capped(f3, 2);
    let kb = klein_bottle(3).unwrap();
    let direct = LodaySpec::new(Arc::new(kb.total.clone()), a.clone())
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_degree_budget(2)
        .with_weight_budget(2)
        .build()
        .unwrap();
    let fiberwise = FiberwiseLabels::new(Arc::new(kb.fiber.clone()), a, kb.action.clone(), 2, Some(2)).unwrap();
    let twisted = LodayComplex::with_system(Arc::new(kb.base.clone()), fiberwise, Some(kb.tau.clone()), 2, Some(2)).unwrap();
    let hd = direct.homology().unwrap();
    let ht = twisted.homology().unwrap();
    assert_eq!(hd, ht);
    assert_eq!(hd.get(0, 0), 1);
}

#[test]
fn rejects_budget_above_truncation() {
    let s1 = Arc::new(sphere(1, 2).unwrap());
    let err = LodaySpec::new(s1, truncated_poly(Rationals, 2).unwrap())
        .with_degree_budget(2)
        .build()
        .err()
        .unwrap();
    assert!(matches!(err, LodayError::DegreeBudget { .. }));
}

#[test]
fn overflowing_algebra_needs_weight_budget() {
    let s1 = Arc::new(sphere(1, 2).unwrap());
    let err = LodaySpec::new(s1, poly_weight_capped(Rationals, 2)).build().err().unwrap();
    assert_eq!(err, LodayError::WeightBudgetRequired);
}
