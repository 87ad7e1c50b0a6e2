use std::sync::Arc;

use loday_core::algebra::{poly_weight_capped, truncated_poly, StructureConstantAlgebra};
use loday_core::field::{Field, PrimeField, Rationals};
use loday_core::homology::HomologyTable;
use loday_core::loday::LodaySpec;
use loday_core::simplicial::{sphere, torus};
use loday_core::torusdiag::TotalComplex;

fn diagonal<F: Field>(n: usize, alg: StructureConstantAlgebra<F>, d: usize, w: Option<u32>) -> HomologyTable {
    let mut spec = LodaySpec::new(Arc::new(torus(n, d + 1).unwrap()), alg).with_degree_budget(d);
    if let Some(w) = w {
        spec = spec.with_weight_budget(w);
    }
    spec.build().unwrap().homology().unwrap()
}

fn total<F: Field>(n: usize, alg: StructureConstantAlgebra<F>, d: usize, weights: &[u32]) -> HomologyTable {
    TotalComplex::new(n, alg, true, d).unwrap().homology(d, weights).unwrap()
}

fn sphere_table<F: Field>(dim: usize, alg: StructureConstantAlgebra<F>, d: usize) -> HomologyTable {
    LodaySpec::new(Arc::new(sphere(dim, d + 1).unwrap()), alg)
        .with_degree_budget(d)
        .build()
        .unwrap()
        .homology()
        .unwrap()
}

#[test]
fn total_complex_matches_diagonal_on_two_torus() {
    let a = truncated_poly(Rationals, 2).unwrap();
    let dia = diagonal(2, a.clone(), 2, None);
    let tot = total(2, a, 2, &(0..=8).collect::<Vec<_>>());
    for d in 0..=2 {
        for w in 0..=8 {
            assert_eq!(dia.get(d, w), tot.get(d, w), "degree {d} weight {w}");
        }
    }
    let p = poly_weight_capped(Rationals, 3);
    let dia = diagonal(2, p.clone(), 2, Some(3));
    let tot = total(2, p, 2, &[0, 1, 2, 3]);
    assert_eq!(dia, tot);
}

#[test]
fn total_complex_matches_diagonal_on_three_torus() {
    let p = poly_weight_capped(Rationals, 2);
    let dia = diagonal(3, p.clone(), 2, Some(2));
    let tot = total(3, p, 2, &[0, 1, 2]);
    assert_eq!(dia, tot);
}

#[test]
fn two_torus_against_cell_bouquet() {
    for (p, agree_through) in [(2u64, 3usize), (3, 1)] {
        let f = PrimeField::new(p).unwrap();
        let a = truncated_poly(f, 2).unwrap();
        let tc = TotalComplex::new(2, a.clone(), true, 3).unwrap();
        let weights: Vec<u32> = (0..=tc.weight_bound(4)).collect();
        let t2 = tc.homology(3, &weights).unwrap().by_degree();
        let s1 = sphere_table(1, a.clone(), 3);
        let s2 = sphere_table(2, a, 3);
        let bouquet = s1.tensor(&s1).tensor(&s2).by_degree();
        for d in 0..=3 {
            assert_eq!(t2[d] == bouquet[d], d <= agree_through, "F{p} degree {d}: {t2:?} vs {bouquet:?}");
        }
    }
}
