//! The E² page of the spectral sequence for a twisted cartesian product,
//! computed from a declared fiber-homology algebra with its group action.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{free_graded_commutative, Generator, GroupActionOnAlgebra};
use crate::field::Field;
use crate::homology::HomologyTable;
use crate::loday::{strand_homology, Coefficients, LodayError, LodaySpec};
use crate::simplicial::{sphere, FiniteGroup, TwistingFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error(transparent)]
    Loday(#[from] LodayError),
    #[error("fiber algebra is not graded-commutative")]
    NotGradedCommutative,
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct E2Cell {
    pub p: usize,
    pub q: usize,
    pub weight: u32,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Page {
    pub provenance: String,
    pub max_degree: usize,
    pub max_weight: Option<u32>,
    /// Sorted by `(p, q, weight)`; zero cells included across the certified range.
    pub cells: Vec<E2Cell>,
}

impl E2Page {
    /// `dim E²_{p,q}` summed over weights.
    pub fn get(&self, p: usize, q: usize) -> usize {
        self.cells.iter().filter(|c| c.p == p && c.q == q).map(|c| c.dim).sum()
    }

    pub fn get_weighted(&self, p: usize, q: usize, w: u32) -> usize {
        self.cells
            .iter()
            .find(|c| (c.p, c.q, c.weight) == (p, q, w))
            .map_or(0, |c| c.dim)
    }

    /// `sum_{p+q=n} dim E²_{p,q}` in weight `w`, or over all weights.
    pub fn total(&self, n: usize, w: Option<u32>) -> usize {
        self.cells
            .iter()
            .filter(|c| c.p + c.q == n && w.is_none_or(|w| c.weight == w))
            .map(|c| c.dim)
            .sum()
    }

    /// Internal degrees `q` with a nonzero entry.
    pub fn nonzero_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.cells.iter().filter(|c| c.dim > 0).map(|c| c.q).collect();
        rows.dedup();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,q,weight,dim\n");
        for c in &self.cells {
            out.push_str(&format!("{},{},{},{}\n", c.p, c.q, c.weight, c.dim));
        }
        out
    }
}

/// Homology of the twisted Loday construction of a graded fiber algebra over
/// the base, strand by strand: `E²_{p,q}` is the homology at simplicial degree
/// `p` of the internal-degree-`q` strand.
pub fn e2_page<F: Field>(spec: &LodaySpec<F>, provenance: &str) -> Result<E2Page, SpectralError> {
    if !spec.algebra.graded_commutative() {
        return Err(SpectralError::NotGradedCommutative);
    }
    let complex = spec.build()?;
    let d = spec.degree_budget;
    let mut cells: BTreeMap<(usize, usize, u32), usize> = BTreeMap::new();
    if let Some(wb) = spec.weight_budget {
        for p in 0..=d {
            for q in 0..=d - p {
                for w in 0..=wb {
                    cells.insert((p, q, w), 0);
                }
            }
        }
    }
    for (q, w) in complex.all_strand_keys()? {
        let strand = complex.strand(q, w)?;
        for (p, h) in strand_homology(complex.field(), &strand).into_iter().enumerate() {
            if p + q as usize <= d {
                *cells.entry((p, q as usize, w)).or_insert(0) += h;
            }
        }
    }
    Ok(E2Page {
        provenance: provenance.to_string(),
        max_degree: d,
        max_weight: spec.weight_budget,
        cells: cells
            .into_iter()
            .map(|((p, q, weight), dim)| E2Cell { p, q, weight, dim })
            .collect(),
    })
}

/// Homology of the twisted Hochschild complex of `Λ(εx)` over the circle,
/// the generator of `C2` acting by `εx ↦ sign·εx`.
pub fn twisted_hochschild_exterior<F: Field>(field: F, sign: i64, degree_budget: usize) -> Result<HomologyTable, SpectralError> {
    if sign != 1 && sign != -1 {
        return Err(SpectralError::Invalid(format!("sign must be ±1, got {sign}")));
    }
    let circle = Arc::new(sphere(1, degree_budget + 1).map_err(LodayError::from)?);
    let ext = free_graded_commutative(field.clone(), &[Generator::new("ex", 1, 1)], 1, 1).map_err(LodayError::from)?;
    let g = FiniteGroup::cyclic(2);
    let tau = TwistingFunction::from_edges(&circle, g.clone(), |_| 1).map_err(LodayError::from)?;
    let action = GroupActionOnAlgebra::scaling_generators(&ext, g, &[field.from_i64(sign)]).map_err(LodayError::from)?;
    let spec = LodaySpec::new(circle, ext)
        .with_coefficients(Coefficients::SameAsAlgebra)
        .with_twist(tau, action)
        .with_degree_budget(degree_budget);
    Ok(spec.build()?.homology()?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub degree: usize,
    pub weight: Option<u32>,
    pub e2_total: usize,
    pub direct: usize,
}

/// Whether `sum_{p+q=n} dim E²_{p,q} = dim π_n` of the direct computation,
/// weight by weight when both sides are weighted. Equality is necessary for
/// degeneration at E²; it is reported, never assumed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub holds: bool,
    pub rows: Vec<CollapseRow>,
}

pub fn collapse_check(page: &E2Page, direct: &HomologyTable, max_degree: usize) -> CollapseReport {
    let max_degree = max_degree.min(page.max_degree).min(direct.max_degree);
    let mut rows = Vec::new();
    match (page.max_weight, direct.max_weight) {
        (Some(a), Some(b)) => {
            for n in 0..=max_degree {
                for w in 0..=a.min(b) {
                    rows.push(CollapseRow {
                        degree: n,
                        weight: Some(w),
                        e2_total: page.total(n, Some(w)),
                        direct: direct.get(n, w),
                    });
                }
            }
        }
        _ => {
            let by_degree = direct.by_degree();
            for n in 0..=max_degree {
                rows.push(CollapseRow {
                    degree: n,
                    weight: None,
                    e2_total: page.total(n, None),
                    direct: by_degree.get(n).copied().unwrap_or(0),
                });
            }
        }
    }
    CollapseReport {
        holds: rows.iter().all(|r| r.e2_total == r.direct),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ground, tensor_power, truncated_poly};
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn exterior_sign_tables() {
        let q = Rationals;
        assert_eq!(twisted_hochschild_exterior(q, -1, 4).unwrap().by_degree(), vec![1, 0, 0, 0, 0]);
        assert_eq!(twisted_hochschild_exterior(q, 1, 4).unwrap().by_degree(), vec![1, 1, 1, 1, 1]);
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(
            twisted_hochschild_exterior(f2, -1, 4).unwrap(),
            twisted_hochschild_exterior(f2, 1, 4).unwrap()
        );
        assert!(twisted_hochschild_exterior(q, 2, 3).is_err());
    }

    #[test]
    fn trivial_twist_over_point_fiber() {
        let b = Arc::new(sphere(2, 3).unwrap());
        let spec = LodaySpec::new(b, ground(Rationals)).with_degree_budget(2);
        let page = e2_page(&spec, "ground").unwrap();
        assert_eq!(page.get(0, 0), 1);
        assert_eq!(page.cells.iter().map(|c| c.dim).sum::<usize>(), 1);
        let direct = spec.build().unwrap().homology().unwrap();
        assert!(collapse_check(&page, &direct, 2).holds);
    }

    #[test]
    fn double_cover_page_is_row_zero() {
        let f3 = PrimeField::new(3).unwrap();
        let a = truncated_poly(f3, 2).unwrap();
        let (a2, swap) = tensor_power(&a, 2).unwrap();
        let s1 = Arc::new(sphere(1, 4).unwrap());
        let tau = TwistingFunction::from_edges(&s1, FiniteGroup::cyclic(2), |_| 1).unwrap();
        let spec = LodaySpec::new(s1, a2)
            .with_coefficients(Coefficients::SameAsAlgebra)
            .with_twist(tau, swap)
            .with_degree_budget(3);
        let page = e2_page(&spec, "double cover").unwrap();
        assert_eq!(page.nonzero_rows(), vec![0]);
        assert_eq!((0..=3).map(|p| page.get(p, 0)).collect::<Vec<_>>(), vec![2, 1, 1, 1]);
        assert!(page.to_csv().starts_with("p,q,weight,dim\n0,0,0,1\n"));
    }
}
