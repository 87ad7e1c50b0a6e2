//! Torus against its cell bouquet `⋁_{k=1}^n ⋁_{C(n,k)} S^k`.

use std::sync::Arc;

use loday_core::algebra::StructureConstantAlgebra;
use loday_core::field::Field;
use loday_core::homology::{compare_tables, HomologyTable, TableComparison};
use loday_core::loday::LodaySpec;
use loday_core::simplicial::{sphere, torus, wedge_all};
use loday_core::torusdiag::TotalComplex;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Largest `n` whose bouquet is built as one wedge; above it the bouquet
/// side is the Künneth product of the sphere tables.
pub const LITERAL_WEDGE_MAX_N: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BouquetMethod {
    Wedge,
    Kunneth,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    pub max_degree: usize,
    pub torus: HomologyTable,
    pub bouquet: HomologyTable,
    pub bouquet_method: BouquetMethod,
    /// Torus (left) against bouquet (right).
    pub comparison: TableComparison,
    pub first_divergence_degree: Option<usize>,
    /// Whether the torus total is strictly smaller at the first divergence.
    pub torus_smaller: Option<bool>,
    /// The torus table against the diagonal Loday construction, when small enough.
    pub torus_cross_check: Option<TableComparison>,
    /// The wedge against the Künneth product of the sphere tables, when both are built.
    pub kunneth_cross_check: Option<TableComparison>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn loday_table<F: Field>(
    space: loday_core::simplicial::TruncatedSimplicialSet,
    algebra: &StructureConstantAlgebra<F>,
    max_degree: usize,
    weight_budget: Option<u32>,
) -> Result<HomologyTable> {
    let mut spec = LodaySpec::new(Arc::new(space), algebra.clone()).with_degree_budget(max_degree);
    if let Some(w) = weight_budget {
        spec = spec.with_weight_budget(w);
    }
    Ok(spec.build()?.homology()?)
}

/// Compares the reduced Loday homology of `T^n` with that of its cell bouquet
/// through `max_degree`. Algebras that are not finite need a weight budget.
pub fn stability_compare<F: Field>(
    algebra: &StructureConstantAlgebra<F>,
    n: usize,
    max_degree: usize,
    weight_budget: Option<u32>,
) -> Result<StabilityReport> {
    if n == 0 {
        return Err(HarnessError::Input("the torus dimension must be at least 1".into()));
    }
    if max_degree < n {
        return Err(HarnessError::Input(format!(
            "degree budget {max_degree} cannot certify degree {n}"
        )));
    }
    let tc = TotalComplex::new(n, algebra.clone(), true, max_degree)?;
    let top_weight = weight_budget.unwrap_or_else(|| tc.weight_bound(max_degree));
    let weights: Vec<u32> = (0..=top_weight).collect();
    let mut torus_table = tc.homology(max_degree, &weights)?;
    if weight_budget.is_none() {
        torus_table.max_weight = None;
    }

    let truncation = max_degree + 1;
    let spheres: Vec<(usize, usize)> = (1..=n).map(|k| (k, binomial(n, k))).collect();
    let sphere_tables = spheres
        .iter()
        .map(|&(k, _)| loday_table(sphere(k, truncation)?, algebra, max_degree, weight_budget))
        .collect::<Result<Vec<_>>>()?;
    let mut kunneth = HomologyTable::new(max_degree, weight_budget);
    kunneth.set(0, 0, 1);
    for ((_, copies), t) in spheres.iter().zip(&sphere_tables) {
        for _ in 0..*copies {
            kunneth = kunneth.tensor(t);
        }
    }

    let (bouquet, bouquet_method, kunneth_cross_check) = if n <= LITERAL_WEDGE_MAX_N {
        let parts = spheres
            .iter()
            .flat_map(|&(k, copies)| std::iter::repeat_n(k, copies))
            .map(|k| sphere(k, truncation))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let wedge = loday_table(wedge_all(&parts)?, algebra, max_degree, weight_budget)?;
        let check = compare_tables(&wedge, &kunneth, max_degree, weight_budget);
        (wedge, BouquetMethod::Wedge, Some(check))
    } else {
        (kunneth, BouquetMethod::Kunneth, None)
    };

    let torus_cross_check = if n <= 2 {
        let d = max_degree.min(2);
        let direct = loday_table(torus(n, d + 1)?, algebra, d, weight_budget)?;
        Some(compare_tables(&torus_table.restrict(d, weight_budget), &direct, d, weight_budget))
    } else {
        None
    };

    let comparison = compare_tables(&torus_table, &bouquet, max_degree, weight_budget);
    let first_divergence_degree = comparison.first_divergence.map(|(d, ..)| d);
    let torus_smaller = first_divergence_degree.map(|d| comparison.degree_totals[d].0 < comparison.degree_totals[d].1);
    Ok(StabilityReport {
        n,
        max_degree,
        torus: torus_table,
        bouquet,
        bouquet_method,
        comparison,
        first_divergence_degree,
        torus_smaller,
        torus_cross_check,
        kunneth_cross_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use loday_core::algebra::{poly_weight_capped, truncated_poly};
    use loday_core::field::{PrimeField, Rationals};

    #[test]
    fn circle_is_its_own_bouquet() {
        let r = stability_compare(&truncated_poly(Rationals, 3).unwrap(), 1, 3, None).unwrap();
        assert!(r.comparison.equal);
        assert_eq!(r.first_divergence_degree, None);
        let f5 = PrimeField::new(5).unwrap();
        let r = stability_compare(&poly_weight_capped(f5, 3), 1, 2, Some(3)).unwrap();
        assert!(r.comparison.equal);
    }

    #[test]
    fn rational_two_torus_diverges() {
        let r = stability_compare(&truncated_poly(Rationals, 2).unwrap(), 2, 2, None).unwrap();
        assert_eq!(r.first_divergence_degree, Some(2));
        assert_eq!(r.torus_smaller, Some(true));
        assert_eq!(r.comparison.degree_totals[2], (3, 4));
        assert!(r.torus_cross_check.unwrap().equal);
        assert!(r.kunneth_cross_check.unwrap().equal);
    }

    #[test]
    fn budget_must_reach_n() {
        assert!(matches!(
            stability_compare(&truncated_poly(Rationals, 2).unwrap(), 3, 2, None),
            Err(HarnessError::Input(_))
        ));
    }
}
