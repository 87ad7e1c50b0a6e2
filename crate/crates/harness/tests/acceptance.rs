//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use loday_core::algebra::{
    free_graded_commutative, poly_weight_capped, tensor_power, truncated_poly, Generator, GroupActionOnAlgebra,
    StructureConstantAlgebra,
};
use loday_core::field::{Field, PrimeField, Rationals};
use loday_core::homology::HomologyTable;
use loday_core::loday::{compare_full_vs_normalized, Coefficients, FiberwiseLabels, LabelSystem, LodayComplex, LodaySpec, Monomial};
use loday_core::simplicial::{
    circle_two_cell, cyclic_cover, discrete, klein_bottle, point, product, sphere, torus, torus_cell_bouquet, validate,
    wedge, FiniteGroup, TruncatedSimplicialSet, TwistingFunction, TwoCellOrientation,
};
use loday_core::spectral::{collapse_check, e2_page, twisted_hochschild_exterior};
use loday_core::torusdiag::{diagonal_minus_volume, TotalComplex};
use loday_harness::golden::expected_table;
use loday_harness::stability::stability_compare;
use loday_harness::{compute_report, Scenario};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn reduced<F: Field>(space: TruncatedSimplicialSet, alg: StructureConstantAlgebra<F>, d: usize, w: Option<u32>) -> Result<HomologyTable, String> {
    let mut spec = LodaySpec::new(Arc::new(space), alg).with_degree_budget(d);
    if let Some(w) = w {
        spec = spec.with_weight_budget(w);
    }
    spec.build().map_err(err)?.homology().map_err(err)
}

fn sphere_tables() -> Check {
    let q = Rationals;
    let cases: [(usize, StructureConstantAlgebra<Rationals>, usize, Option<u32>, Vec<usize>, &str); 3] = [
        (1, poly_weight_capped(q, 4), 3, Some(4), vec![1, 1, 0, 0], "HHn_Q_poly(n=1)"),
        (2, poly_weight_capped(q, 4), 4, Some(4), vec![1, 0, 1, 0, 1], "HHn_Q_poly(n=2)"),
        (1, truncated_poly(q, 2).map_err(err)?, 4, None, vec![1, 1, 1, 1, 1], "HHn_Q_trunc(n=1,m=2)"),
    ];
    let mut parts = Vec::new();
    for (dim, alg, d, w, want, golden) in cases {
        let h = reduced(sphere(dim, d + 1).map_err(err)?, alg, d, w)?;
        ensure(h.by_degree() == want, format!("S{dim}: {:?}, expected {want:?}", h.by_degree()))?;
        let expected = expected_table(golden, d, w).map_err(err)?;
        let weights = expected.weights();
        for dd in 0..=d {
            for &ww in &weights {
                ensure(
                    h.get(dd, ww) == expected.get(dd, ww),
                    format!("S{dim} cell {dd},{ww}: {} vs {golden} {}", h.get(dd, ww), expected.get(dd, ww)),
                )?;
            }
        }
        parts.push(format!("S{dim} {:?}", h.by_degree()));
    }
    Ok(parts.join("; "))
}

fn rational_non_stability() -> Check {
    let a = truncated_poly(Rationals, 2).map_err(err)?;
    let r = stability_compare(&a, 2, 2, None).map_err(err)?;
    let (torus_pi2, bouquet_pi2) = r.comparison.degree_totals[2];
    let enumerated = expected_table("bouquet_Q_trunc(n=2,m=2)", 2, None).map_err(err)?.by_degree()[2];
    ensure(enumerated == 4, format!("enumerator gives {enumerated}, expected 4"))?;
    ensure(bouquet_pi2 == enumerated, format!("engine bouquet {bouquet_pi2} vs enumerator {enumerated}"))?;
    let cross = r.torus_cross_check.as_ref().ok_or("no torus cross-check")?;
    ensure(cross.equal, "total complex and diagonal construction disagree on T^2")?;
    ensure(torus_pi2 < bouquet_pi2, format!("torus {torus_pi2} not below bouquet {bouquet_pi2}"))?;
    Ok(format!("dim pi_2: torus {torus_pi2} < bouquet {bouquet_pi2}"))
}

fn prime_non_stability() -> Check {
    let f3 = PrimeField::new(3).map_err(err)?;
    let r3 = stability_compare(&truncated_poly(f3, 2).map_err(err)?, 2, 3, None).map_err(err)?;
    ensure(
        r3.first_divergence_degree == Some(2),
        format!("F3 first divergence {:?}", r3.first_divergence_degree),
    )?;
    let f2 = PrimeField::new(2).map_err(err)?;
    let r2 = stability_compare(&truncated_poly(f2, 2).map_err(err)?, 2, 3, None).map_err(err)?;
    ensure(r2.comparison.equal, format!("F2 diverges at {:?}", r2.comparison.first_divergence))?;
    let (t3, b3) = r3.comparison.degree_totals[2];
    Ok(format!(
        "F3 diverges at degree 2 ({t3} vs {b3}); F2 agrees through degree 3 {:?}",
        r2.torus.by_degree()
    ))
}

fn klein_bottle_pattern() -> Check {
    let f3 = PrimeField::new(3).map_err(err)?;
    let kb = klein_bottle(3).map_err(err)?;
    let direct = LodaySpec::new(Arc::new(kb.total.clone()), poly_weight_capped(f3, 2))
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_degree_budget(2)
        .with_weight_budget(2);
    let h = direct.build().map_err(err)?.homology().map_err(err)?;
    for w in 1..=2 {
        let got = (h.get(0, w), h.get(1, w), h.get(2, w));
        ensure(got == (1, 1, 0), format!("weight {w}: (H0, H1, H2) = {got:?}, expected (1, 1, 0)"))?;
    }
    let fiber_homology = free_graded_commutative(
        f3,
        &[Generator::new("x", 0, 1), Generator::new("ex", 1, 1)],
        3,
        2,
    )
    .map_err(err)?;
    let g = FiniteGroup::cyclic(2);
    let s1 = Arc::new(sphere(1, 3).map_err(err)?);
    let tau = TwistingFunction::from_edges(&s1, g.clone(), |_| 1).map_err(err)?;
    let action = GroupActionOnAlgebra::scaling_generators(&fiber_homology, g, &[f3.one(), f3.from_i64(-1)]).map_err(err)?;
    let spec = LodaySpec::new(s1, fiber_homology)
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_twist(tau, action)
        .with_degree_budget(2)
        .with_weight_budget(2);
    let page = e2_page(&spec, "Klein bottle").map_err(err)?;
    ensure(page.nonzero_rows() == vec![0], format!("E2 rows {:?}", page.nonzero_rows()))?;
    let collapse = collapse_check(&page, &h, 2);
    ensure(collapse.holds, "E2 totals differ from the direct computation")?;
    Ok("weights 1, 2: H0 = H1 = 1, H2 = 0; E2 concentrated in row 0".into())
}

fn finite_covers() -> Check {
    let f3 = PrimeField::new(3).map_err(err)?;
    let a = truncated_poly(f3, 2).map_err(err)?;
    let hh = LodaySpec::new(Arc::new(sphere(1, 4).map_err(err)?), a.clone())
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_degree_budget(3)
        .build()
        .map_err(err)?
        .homology()
        .map_err(err)?
        .by_degree();
    ensure(hh == vec![2, 1, 1, 1], format!("HH(A) = {hh:?}"))?;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let (an, rotation) = tensor_power(&a, n).map_err(err)?;
        let s1 = Arc::new(sphere(1, 4).map_err(err)?);
        let tau = TwistingFunction::from_edges(&s1, FiniteGroup::cyclic(n), |_| 1).map_err(err)?;
        let twisted = LodaySpec::new(s1, an)
            .with_coefficients(Coefficients::SameAsAlgebra)
            .with_twist(tau, rotation)
            .with_degree_budget(3)
            .build()
            .map_err(err)?
            .homology()
            .map_err(err)?
            .by_degree();
        ensure(twisted == hh, format!("n = {n}: {twisted:?} vs HH(A) {hh:?}"))?;
        parts.push(format!("n={n} {twisted:?}"));
    }
    Ok(format!("{} equal HH(A)", parts.join(", ")))
}

fn diagonal_witnesses() -> Check {
    for (n, k, c) in [(2, 2, 2), (3, 3, 6), (2, 3, 0)] {
        let r = diagonal_minus_volume(n, k, c).map_err(err)?;
        ensure(r.certified && r.witness.is_some(), format!("{}: no witness", r.description))?;
    }
    let control = diagonal_minus_volume(2, 2, 0).map_err(err)?;
    ensure(!control.certified, "Δ2(t²) alone should not be a boundary")?;
    Ok("Δ2(t²) - 2 vol2, Δ3(t³) - 6 vol3 and (t³) on T² bound verified witnesses".into())
}

fn twisted_exterior() -> Check {
    let q = Rationals;
    let ext = free_graded_commutative(q, &[Generator::new("ex", 1, 1)], 1, 1).map_err(err)?;
    let s1 = Arc::new(sphere(1, 6).map_err(err)?);
    let g = FiniteGroup::cyclic(2);
    let tau = TwistingFunction::from_edges(&s1, g.clone(), |_| 1).map_err(err)?;
    let action = GroupActionOnAlgebra::scaling_generators(&ext, g, &[q.from_i64(-1)]).map_err(err)?;
    let c = LodaySpec::new(s1.clone(), ext)
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_twist(tau, action)
        .with_degree_budget(5)
        .build()
        .map_err(err)?;
    let ex = 1u32;
    for k in 1..=4usize {
        let base = s1.basepoint(k);
        let m = Monomial((0..s1.level_size(k) as u32).filter(|&x| x != base).map(|x| (x, ex)).collect());
        let target = Monomial((0..s1.level_size(k - 1) as u32).map(|x| (x, ex)).collect());
        let d = c.differential_of(k, &m).map_err(err)?;
        ensure(d == vec![(target, q.from_i64(-2))], format!("k = {k}: differential {d:?}"))?;
    }
    let hq = twisted_hochschild_exterior(q, -1, 4).map_err(err)?.by_degree();
    ensure(hq == vec![1, 0, 0, 0, 0], format!("over Q: {hq:?}"))?;
    let f3 = PrimeField::new(3).map_err(err)?;
    let h3 = twisted_hochschild_exterior(f3, -1, 4).map_err(err)?.by_degree();
    ensure(h3 == vec![1, 0, 0, 0, 0], format!("over F3: {h3:?}"))?;
    Ok("1 ⊗ (εx)^⊗k ↦ -2 (εx)^⊗k for k ≤ 4; homology is the ground field over Q and F3".into())
}

fn constructors() -> Result<Vec<(&'static str, TruncatedSimplicialSet)>, String> {
    let e = |x: Result<TruncatedSimplicialSet, loday_core::simplicial::SimplicialError>| x.map_err(err);
    let s1 = e(sphere(1, 3))?;
    let s2 = e(sphere(2, 3))?;
    Ok(vec![
        ("point", point(3)),
        ("discrete", discrete(3, 3)),
        ("S1", s1.clone()),
        ("S2", s2.clone()),
        ("S3", e(sphere(3, 3))?),
        ("T2", e(torus(2, 3))?),
        ("T3", e(torus(3, 2))?),
        ("bouquet", e(torus_cell_bouquet(2, 3))?),
        ("wedge", e(wedge(&s1, &s2))?),
        ("product", e(product(&s1, &s2))?),
        ("cyclic two-cell circle", e(circle_two_cell(3, TwoCellOrientation::Cyclic))?),
        ("parallel two-cell circle", e(circle_two_cell(3, TwoCellOrientation::Parallel))?),
        ("Klein bottle", klein_bottle(3).map_err(err)?.total),
        ("double cover", cyclic_cover(2, 3).map_err(err)?.total),
        ("triple cover", cyclic_cover(3, 3).map_err(err)?.total),
    ])
}

fn check_strands<S: LabelSystem>(c: &LodayComplex<S>, name: &str) -> Result<usize, String> {
    let mut checked = 0;
    for (q, w) in c.all_strand_keys().map_err(err)? {
        // building a strand verifies d² = 0
        let strand = c.strand(q, w).map_err(err)?;
        for p in 1..=strand.top() {
            for m in c.enumerate_basis(p, w).map_err(err)? {
                if c.monomial_grading(&m) != (q, w) {
                    continue;
                }
                for (t, _) in c.differential_of(p, &m).map_err(err)? {
                    ensure(
                        c.monomial_grading(&t) == (q, w),
                        format!("{name}: differential leaves strand ({q}, {w})"),
                    )?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

fn structural() -> Check {
    let spaces = constructors()?;
    for (name, x) in &spaces {
        let v = validate(x);
        ensure(v.is_empty(), format!("{name}: {} violations", v.len()))?;
    }

    let q = Rationals;
    let f3 = PrimeField::new(3).map_err(err)?;
    let a3 = truncated_poly(f3, 2).map_err(err)?;
    let mut terms = 0;
    let complexes = [
        ("S2 Q[t]/t^3", LodaySpec::new(Arc::new(sphere(2, 4).map_err(err)?), truncated_poly(q, 3).map_err(err)?).with_degree_budget(3)),
        ("T2 Q[t]", LodaySpec::new(Arc::new(torus(2, 3).map_err(err)?), poly_weight_capped(q, 3)).with_degree_budget(2).with_weight_budget(3)),
    ];
    for (name, spec) in complexes {
        terms += check_strands(&spec.build().map_err(err)?, name)?;
    }
    let kb = klein_bottle(3).map_err(err)?;
    let klein = LodaySpec::new(Arc::new(kb.total.clone()), poly_weight_capped(f3, 2))
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_degree_budget(2)
        .with_weight_budget(2)
        .build()
        .map_err(err)?;
    terms += check_strands(&klein, "Klein")?;
    let tc = TotalComplex::new(2, a3.clone(), true, 3).map_err(err)?;
    for d in 1..=4 {
        for w in 0..=tc.weight_bound(d) {
            tc.differential(d, w).map_err(err)?;
        }
    }

    let tiny = [
        LodaySpec::new(Arc::new(sphere(1, 3).map_err(err)?), truncated_poly(q, 2).map_err(err)?).with_degree_budget(2),
        LodaySpec::new(Arc::new(sphere(2, 3).map_err(err)?), truncated_poly(q, 2).map_err(err)?).with_degree_budget(2),
        LodaySpec::new(Arc::new(torus(2, 2).map_err(err)?), truncated_poly(q, 2).map_err(err)?).with_degree_budget(1),
    ];
    for spec in &tiny {
        ensure(compare_full_vs_normalized(spec, 200_000).map_err(err)?, "Moore and normalized homology differ")?;
    }

    let cover = cyclic_cover(2, 4).map_err(err)?;
    let total = LodaySpec::new(Arc::new(cover.total.clone()), a3.clone())
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_degree_budget(3)
        .build()
        .map_err(err)?;
    let (a2, rotation) = tensor_power(&a3, 2).map_err(err)?;
    let s1 = Arc::new(sphere(1, 4).map_err(err)?);
    let tau = TwistingFunction::from_edges(&s1, FiniteGroup::cyclic(2), |_| 1).map_err(err)?;
    let twisted = LodaySpec::new(s1, a2)
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_twist(tau, rotation)
        .with_degree_budget(3)
        .build()
        .map_err(err)?;
    ensure(
        total.chain_dims().map_err(err)? == twisted.chain_dims().map_err(err)?,
        "double cover: chain dimensions differ",
    )?;
    ensure(
        total.homology().map_err(err)? == twisted.homology().map_err(err)?,
        "double cover: homology differs",
    )?;
    let labels = FiberwiseLabels::new(Arc::new(kb.fiber.clone()), poly_weight_capped(f3, 2), kb.action.clone(), 2, Some(2))
        .map_err(err)?;
    let fiberwise = LodayComplex::with_system(Arc::new(kb.base.clone()), labels, Some(kb.tau.clone()), 2, Some(2)).map_err(err)?;
    ensure(
        klein.chain_dims().map_err(err)? == fiberwise.chain_dims().map_err(err)?,
        "Klein bottle: chain dimensions differ",
    )?;
    ensure(
        klein.homology().map_err(err)? == fiberwise.homology().map_err(err)?,
        "Klein bottle: homology differs",
    )?;

    let scenario = Scenario::bundled("stability_f3_n2").map_err(err)?;
    let mut reports = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        let report = pool.install(|| compute_report(&scenario)).map_err(err)?;
        reports.push(report.to_json().map_err(err)?);
    }
    ensure(reports[0] == reports[1], "reports differ between 1 and 4 threads")?;

    Ok(format!(
        "{} constructors valid; {terms} differential terms weight-preserving; Moore = normalized; cover and Klein blocks match; reports deterministic",
        spaces.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("sphere tables", sphere_tables),
        ("non-stability over Q at n = 2", rational_non_stability),
        ("F_p non-stability and Hopf control", prime_non_stability),
        ("Klein bottle", klein_bottle_pattern),
        ("finite covers", finite_covers),
        ("diagonal relation witnesses", diagonal_witnesses),
        ("twisted exterior table", twisted_exterior),
        ("structural properties", structural),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
