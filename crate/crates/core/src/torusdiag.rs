//! The torus as an n-fold product of circles: the normalized n-fold chain
//! complex of the Loday construction, its total complex per weight, and
//! certified relations between multi-matrix classes.
//!
//! An element in multi-degree `V` is a multi-matrix with one entry per
//! coordinate `0 <= v <= V`; only non-unit entries are stored. Coordinate
//! `v_i` in place `i` is the id of a simplex of the minimal circle in level
//! `V_i`, with `0` the basepoint.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{poly_weight_capped, AlgebraError, SparseVec, StructureConstantAlgebra};
use crate::field::{Field, Rationals};
use crate::homology::{rank, HomologyError, HomologyTable, Reduction, SparseMatrix};
use crate::simplicial::{sphere, SimplicialError, TruncatedSimplicialSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error("the algebra must be commutative and concentrated in degree 0")]
    NotCommutative,
    #[error("the algebra must be weighted")]
    Unweighted,
    #[error("total degree {requested} exceeds the configured maximum {max}")]
    DegreeBudget { requested: usize, max: usize },
    #[error("chain is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("target is not a cycle: {0}")]
    NotACycle(String),
    #[error("polynomial has a constant term")]
    ConstantTerm,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type MultiIndex = Vec<usize>;

/// A multi-matrix with the given non-unit entries (coordinate, basis index),
/// sorted by coordinate with distinct coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiMatrix {
    pub degree: Vec<usize>,
    pub entries: Vec<(MultiIndex, usize)>,
}

impl MultiMatrix {
    pub fn total_degree(&self) -> usize {
        self.degree.iter().sum()
    }
}

/// A formal linear combination of multi-matrices, sorted and without zero terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMatrixChain<E> {
    pub terms: Vec<(MultiMatrix, E)>,
}

impl<E: Clone + PartialEq> MultiMatrixChain<E> {
    pub fn zero() -> Self {
        MultiMatrixChain { terms: Vec::new() }
    }

    pub fn from_terms<F: Field<Elem = E>>(field: &F, mut terms: Vec<(MultiMatrix, E)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(MultiMatrix, E)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = field.add(lc, &c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !field.is_zero(c));
        MultiMatrixChain { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        Self::from_terms(field, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        Self::from_terms(field, self.terms.iter().map(|(m, x)| (m.clone(), field.mul(x, c))).collect())
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.scale(field, &field.from_i64(-1)))
    }

    /// Serializable records with labels named by the algebra.
    pub fn records<F: Field<Elem = E>>(&self, alg: &StructureConstantAlgebra<F>) -> Vec<ChainRecord> {
        self.terms
            .iter()
            .map(|(m, c)| ChainRecord {
                degree: m.degree.clone(),
                entries: m
                    .entries
                    .iter()
                    .map(|(v, l)| EntryRecord {
                        coordinate: v.clone(),
                        label: alg.name(*l).to_string(),
                    })
                    .collect(),
                coefficient: alg.field().format(c),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub coordinate: Vec<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub degree: Vec<usize>,
    pub entries: Vec<EntryRecord>,
    pub coefficient: String,
}

/// Basis of the total complex in one (total degree, weight).
pub struct TotalComplexBlock {
    pub degree: usize,
    pub weight: u32,
    pub basis: Vec<MultiMatrix>,
    index: HashMap<MultiMatrix, usize>,
}

impl TotalComplexBlock {
    pub fn index_of(&self, m: &MultiMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }
}

type Lin<E> = Vec<(Option<usize>, E)>;

/// The normalized n-fold complex of the Loday construction of a commutative
/// weighted algebra over the n-torus, with coefficients in the ground field
/// through the augmentation (reduced) or in the algebra itself.
pub struct TotalComplex<F: Field> {
    n: usize,
    algebra: StructureConstantAlgebra<F>,
    reduced: bool,
    max_degree: usize,
    circle: TruncatedSimplicialSet,
    free: Vec<Vec<u64>>,
    blocks: Mutex<HashMap<(usize, u32), Arc<TotalComplexBlock>>>,
    differentials: Mutex<HashMap<(usize, u32), Arc<SparseMatrix<F::Elem>>>>,
    reductions: Mutex<HashMap<(usize, u32), Arc<Reduction<F>>>>,
}

fn compositions(d: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in compositions(d - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl<F: Field> TotalComplex<F> {
    /// Blocks are available in total degrees up to `max_degree + 1`.
    pub fn new(n: usize, algebra: StructureConstantAlgebra<F>, reduced: bool, max_degree: usize) -> Result<Self, TorusError> {
        if n == 0 {
            return Err(TorusError::Invalid("the torus needs at least one circle".into()));
        }
        if algebra.is_graded() || !algebra.graded_commutative() {
            return Err(TorusError::NotCommutative);
        }
        if !algebra.is_weighted() {
            return Err(TorusError::Unweighted);
        }
        if max_degree + 1 > 63 {
            return Err(TorusError::Invalid("degree above 62".into()));
        }
        let circle = sphere(1, max_degree + 1)?;
        let free = (0..=max_degree + 1)
            .map(|p| {
                let mut masks = vec![0u64; circle.level_size(p)];
                for (i, comp) in circle.degeneracy_complements(p).iter().enumerate() {
                    for &x in comp {
                        masks[x as usize] |= 1 << i;
                    }
                }
                masks
            })
            .collect();
        Ok(TotalComplex {
            n,
            algebra,
            reduced,
            max_degree,
            circle,
            free,
            blocks: Mutex::new(HashMap::new()),
            differentials: Mutex::new(HashMap::new()),
            reductions: Mutex::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &StructureConstantAlgebra<F> {
        &self.algebra
    }

    pub fn field(&self) -> &F {
        self.algebra.field()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check_degree(&self, d: usize) -> Result<(), TorusError> {
        if d > self.max_degree + 1 {
            return Err(TorusError::DegreeBudget {
                requested: d,
                max: self.max_degree + 1,
            });
        }
        Ok(())
    }

    fn coverage_mask(&self, degree: &[usize], coord: &[usize]) -> u64 {
        let mut mask = 0u64;
        let mut offset = 0;
        for (i, &vi) in degree.iter().enumerate() {
            mask |= self.free[vi][coord[i]] << offset;
            offset += vi;
        }
        mask
    }

    /// Whether a multi-matrix survives the quotient by degeneracies in every direction.
    pub fn is_normalized(&self, m: &MultiMatrix) -> bool {
        let total = m.total_degree();
        let full = if total == 0 { 0 } else { (1u64 << total) - 1 };
        let covered = m.entries.iter().fold(0, |acc, (c, _)| acc | self.coverage_mask(&m.degree, c));
        covered & full == full
    }

    fn positions(&self, degree: &[usize]) -> Vec<MultiIndex> {
        let mut out = vec![Vec::new()];
        for &vi in degree {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (0..=vi).map(move |x| {
                        let mut c = prefix.clone();
                        c.push(x);
                        c
                    })
                })
                .collect();
        }
        if self.reduced {
            out.retain(|c| c.iter().any(|&x| x != 0));
        }
        out
    }

    fn enumerate(&self, degree: &[usize], w: u32, out: &mut Vec<MultiMatrix>) {
        let positions = self.positions(degree);
        let total: usize = degree.iter().sum();
        let full = if total == 0 { 0 } else { (1u64 << total) - 1 };
        let masks: Vec<u64> = positions.iter().map(|c| self.coverage_mask(degree, c)).collect();
        let mut suffix = vec![0u64; positions.len() + 1];
        for k in (0..positions.len()).rev() {
            suffix[k] = suffix[k + 1] | masks[k];
        }
        let labels: Vec<(usize, u32)> = (0..self.algebra.dim())
            .filter(|&i| i != self.algebra.unit())
            .map(|i| (i, self.algebra.weight(i)))
            .filter(|(_, wt)| *wt <= w)
            .collect();
        struct Ctx<'a> {
            positions: &'a [MultiIndex],
            masks: &'a [u64],
            suffix: &'a [u64],
            labels: &'a [(usize, u32)],
            full: u64,
            w: u32,
            degree: &'a [usize],
        }
        fn dfs(c: &Ctx<'_>, k: usize, wsum: u32, covered: u64, cur: &mut Vec<(MultiIndex, usize)>, out: &mut Vec<MultiMatrix>) {
            if (covered | c.suffix[k]) & c.full != c.full {
                return;
            }
            if k == c.positions.len() {
                if wsum == c.w {
                    out.push(MultiMatrix {
                        degree: c.degree.to_vec(),
                        entries: cur.clone(),
                    });
                }
                return;
            }
            dfs(c, k + 1, wsum, covered, cur, out);
            for &(l, wt) in c.labels {
                if wsum + wt > c.w {
                    continue;
                }
                cur.push((c.positions[k].clone(), l));
                dfs(c, k + 1, wsum + wt, covered | c.masks[k], cur, out);
                cur.pop();
            }
        }
        let ctx = Ctx {
            positions: &positions,
            masks: &masks,
            suffix: &suffix,
            labels: &labels,
            full,
            w,
            degree,
        };
        dfs(&ctx, 0, 0, 0, &mut Vec::new(), out);
    }

    /// Normalized basis in total degree `d` and weight `w`.
    pub fn block(&self, d: usize, w: u32) -> Result<Arc<TotalComplexBlock>, TorusError> {
        self.check_degree(d)?;
        if let Some(b) = self.blocks.lock().unwrap().get(&(d, w)) {
            return Ok(b.clone());
        }
        let mut basis = Vec::new();
        for v in compositions(d, self.n) {
            self.enumerate(&v, w, &mut basis);
        }
        let index = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let block = Arc::new(TotalComplexBlock {
            degree: d,
            weight: w,
            basis,
            index,
        });
        self.blocks.lock().unwrap().insert((d, w), block.clone());
        Ok(block)
    }

    fn multiply(&self, labels: &[usize]) -> Result<SparseVec<F::Elem>, TorusError> {
        let alg = &self.algebra;
        let mut acc = alg.basis_vec(alg.unit());
        for &l in labels {
            acc = alg.mul(&acc, &alg.basis_vec(l))?;
        }
        Ok(acc)
    }

    /// Multi-matrices from possibly colliding entries: labels at a common
    /// coordinate are multiplied, the basepoint entry goes through the
    /// augmentation when reduced, and unit entries are dropped.
    pub fn assemble(&self, degree: &[usize], entries: &[(MultiIndex, usize)]) -> Result<MultiMatrixChain<F::Elem>, TorusError> {
        let f = self.field();
        let alg = &self.algebra;
        let mut sorted: Vec<(MultiIndex, usize)> = entries.iter().filter(|(_, l)| *l != alg.unit()).cloned().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut partial: Vec<(Vec<(MultiIndex, usize)>, F::Elem)> = vec![(Vec::new(), f.one())];
        let mut k = 0;
        while k < sorted.len() {
            let mut end = k + 1;
            while end < sorted.len() && sorted[end].0 == sorted[k].0 {
                end += 1;
            }
            let coord = sorted[k].0.clone();
            let labels: Vec<usize> = sorted[k..end].iter().map(|(_, l)| *l).collect();
            let product = self.multiply(&labels)?;
            let lin: Lin<F::Elem> = if self.reduced && coord.iter().all(|&x| x == 0) {
                let e = product
                    .iter()
                    .fold(f.zero(), |acc, (i, c)| f.add(&acc, &f.mul(c, alg.augmentation(*i))));
                if f.is_zero(&e) {
                    Vec::new()
                } else {
                    vec![(None, e)]
                }
            } else {
                product
                    .into_iter()
                    .map(|(i, c)| (if i == alg.unit() { None } else { Some(i) }, c))
                    .collect()
            };
            let mut next = Vec::with_capacity(partial.len() * lin.len());
            for (list, c) in &partial {
                for (l, c2) in &lin {
                    let mut l2 = list.clone();
                    if let Some(l) = l {
                        l2.push((coord.clone(), *l));
                    }
                    next.push((l2, f.mul(c, c2)));
                }
            }
            partial = next;
            k = end;
        }
        Ok(MultiMatrixChain::from_terms(
            f,
            partial
                .into_iter()
                .map(|(entries, c)| {
                    (
                        MultiMatrix {
                            degree: degree.to_vec(),
                            entries,
                        },
                        c,
                    )
                })
                .collect(),
        ))
    }

    /// The face `d_{i,j}` (unsigned), keeping degenerate results.
    pub fn face(&self, m: &MultiMatrix, i: usize, j: usize) -> Result<MultiMatrixChain<F::Elem>, TorusError> {
        let vi = m.degree[i];
        let mut degree = m.degree.clone();
        degree[i] -= 1;
        let entries: Vec<(MultiIndex, usize)> = m
            .entries
            .iter()
            .map(|(c, l)| {
                let mut c2 = c.clone();
                c2[i] = self.circle.face(vi, j, c[i] as u32) as usize;
                (c2, *l)
            })
            .collect();
        self.assemble(&degree, &entries)
    }

    /// `d = sum_i (-1)^{v_1 + ... + v_{i-1}} sum_j (-1)^j d_{i,j}`, projected
    /// to the normalized complex. Directions with `v_i = 1` contribute zero
    /// for commutative algebras and are skipped.
    pub fn boundary_of(&self, m: &MultiMatrix) -> Result<MultiMatrixChain<F::Elem>, TorusError> {
        let f = self.field();
        let mut terms = Vec::new();
        let mut prefix = 0usize;
        for i in 0..self.n {
            let vi = m.degree[i];
            if vi >= 2 {
                for j in 0..=vi {
                    let s = f.from_i64(if (prefix + j) % 2 == 1 { -1 } else { 1 });
                    for (t, c) in self.face(m, i, j)?.terms {
                        if self.is_normalized(&t) {
                            terms.push((t, f.mul(&c, &s)));
                        }
                    }
                }
            }
            prefix += vi;
        }
        Ok(MultiMatrixChain::from_terms(f, terms))
    }

    pub fn boundary(&self, chain: &MultiMatrixChain<F::Elem>) -> Result<MultiMatrixChain<F::Elem>, TorusError> {
        let f = self.field();
        let mut terms = Vec::new();
        for (m, c) in &chain.terms {
            for (t, c2) in self.boundary_of(m)?.terms {
                terms.push((t, f.mul(c, &c2)));
            }
        }
        Ok(MultiMatrixChain::from_terms(f, terms))
    }

    /// Differential from total degree `d` to `d - 1` in weight `w`; `d^2 = 0` is checked.
    pub fn differential(&self, d: usize, w: u32) -> Result<Arc<SparseMatrix<F::Elem>>, TorusError> {
        self.check_degree(d)?;
        if let Some(m) = self.differentials.lock().unwrap().get(&(d, w)) {
            return Ok(m.clone());
        }
        let src = self.block(d, w)?;
        let matrix = if d == 0 {
            SparseMatrix::zero(0, src.basis.len())
        } else {
            let dst = self.block(d - 1, w)?;
            let columns: Result<Vec<_>, TorusError> = src
                .basis
                .par_iter()
                .map(|m| {
                    let mut col = Vec::new();
                    for (t, c) in self.boundary_of(m)?.terms {
                        let r = dst
                            .index_of(&t)
                            .ok_or_else(|| TorusError::Invalid(format!("face left the block: {t:?}")))?;
                        col.push((r, c));
                    }
                    col.sort_by_key(|(r, _)| *r);
                    Ok(col)
                })
                .collect();
            SparseMatrix::from_columns(dst.basis.len(), columns?)
        };
        if d >= 2 {
            let below = self.differential(d - 1, w)?;
            if !below.mul(self.field(), &matrix)?.is_zero() {
                return Err(TorusError::Invalid(format!("d^2 != 0 in degree {d}, weight {w}")));
            }
        }
        let matrix = Arc::new(matrix);
        self.differentials.lock().unwrap().insert((d, w), matrix.clone());
        Ok(matrix)
    }

    /// Total degree and weight of a homogeneous nonzero chain.
    pub fn grading(&self, chain: &MultiMatrixChain<F::Elem>) -> Result<Option<(usize, u32)>, TorusError> {
        let mut g = None;
        for (m, _) in &chain.terms {
            let wt = m.entries.iter().map(|(_, l)| self.algebra.weight(*l)).sum();
            let here = (m.total_degree(), wt);
            match g {
                None => g = Some(here),
                Some(prev) if prev != here => return Err(TorusError::Inhomogeneous(format!("{prev:?} and {here:?}"))),
                _ => {}
            }
        }
        Ok(g)
    }

    /// Coordinates in the block basis; degenerate terms vanish.
    pub fn to_vector(&self, chain: &MultiMatrixChain<F::Elem>, d: usize, w: u32) -> Result<SparseVec<F::Elem>, TorusError> {
        let block = self.block(d, w)?;
        let mut v = Vec::new();
        for (m, c) in &chain.terms {
            if !self.is_normalized(m) {
                continue;
            }
            let i = block
                .index_of(m)
                .ok_or_else(|| TorusError::Inhomogeneous(format!("{m:?} is not in block ({d}, {w})")))?;
            v.push((i, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    pub fn from_vector(&self, v: &SparseVec<F::Elem>, d: usize, w: u32) -> Result<MultiMatrixChain<F::Elem>, TorusError> {
        let block = self.block(d, w)?;
        Ok(MultiMatrixChain::from_terms(
            self.field(),
            v.iter().map(|(i, c)| (block.basis[*i].clone(), c.clone())).collect(),
        ))
    }

    fn reduction(&self, d: usize, w: u32) -> Result<Arc<Reduction<F>>, TorusError> {
        if let Some(r) = self.reductions.lock().unwrap().get(&(d, w)) {
            return Ok(r.clone());
        }
        let m = self.differential(d, w)?;
        let r = Arc::new(Reduction::new(self.field(), &m, true));
        self.reductions.lock().unwrap().insert((d, w), r.clone());
        Ok(r)
    }

    /// Solves `d z = chain` for a cycle; the witness is re-verified through
    /// [`TotalComplex::boundary`], independently of the matrix.
    pub fn certify_boundary(&self, chain: &MultiMatrixChain<F::Elem>) -> Result<Certificate<F::Elem>, TorusError> {
        let normalized = MultiMatrixChain::from_terms(
            self.field(),
            chain.terms.iter().filter(|(m, _)| self.is_normalized(m)).cloned().collect(),
        );
        let Some((d, w)) = self.grading(&normalized)? else {
            return Ok(Certificate {
                boundary: true,
                witness: Some(MultiMatrixChain::zero()),
            });
        };
        if !self.boundary(&normalized)?.is_zero() {
            return Err(TorusError::NotACycle(format!("degree {d}, weight {w}")));
        }
        let target = self.to_vector(&normalized, d, w)?;
        let red = self.reduction(d + 1, w)?;
        match red.solve(&target) {
            None => Ok(Certificate {
                boundary: false,
                witness: None,
            }),
            Some(z) => {
                let witness = self.from_vector(&z, d + 1, w)?;
                if self.boundary(&witness)? != normalized {
                    return Err(TorusError::Invalid("witness failed re-substitution".into()));
                }
                Ok(Certificate {
                    boundary: true,
                    witness: Some(witness),
                })
            }
        }
    }

    /// Homology per (total degree, weight) for degrees `0..=max_degree` and the given weights.
    pub fn homology(&self, max_degree: usize, weights: &[u32]) -> Result<HomologyTable, TorusError> {
        if max_degree > self.max_degree {
            return Err(TorusError::DegreeBudget {
                requested: max_degree,
                max: self.max_degree,
            });
        }
        let per_weight: Result<Vec<(u32, Vec<usize>)>, TorusError> = weights
            .par_iter()
            .map(|&w| {
                let ranks: Result<Vec<usize>, TorusError> = (0..=max_degree + 1)
                    .map(|d| match d {
                        0 => Ok(0),
                        _ => Ok(rank(self.field(), &*self.differential(d, w)?)),
                    })
                    .collect();
                let ranks = ranks?;
                let dims: Result<Vec<usize>, TorusError> = (0..=max_degree)
                    .map(|d| Ok(self.block(d, w)?.basis.len() - ranks[d] - ranks[d + 1]))
                    .collect();
                Ok((w, dims?))
            })
            .collect();
        let mut table = HomologyTable::new(max_degree, weights.iter().max().copied());
        for (w, dims) in per_weight? {
            for (d, h) in dims.into_iter().enumerate() {
                table.set(d, w, h);
            }
        }
        Ok(table)
    }

    /// Largest weight a block in total degree `d` can carry.
    pub fn weight_bound(&self, d: usize) -> u32 {
        let positions = compositions(d, self.n)
            .iter()
            .map(|v| v.iter().map(|x| x + 1).product::<usize>())
            .max()
            .unwrap_or(1);
        let positions = if self.reduced { positions - 1 } else { positions };
        positions as u32 * self.algebra.max_weight()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate<E> {
    pub boundary: bool,
    pub witness: Option<MultiMatrixChain<E>>,
}

/// `t^k` at coordinate `1_n` in degree `1_n`; labels are exponents of `t`.
pub fn diagonal_class<F: Field>(field: &F, n: usize, k: usize) -> MultiMatrixChain<F::Elem> {
    MultiMatrixChain::from_terms(
        field,
        vec![(
            MultiMatrix {
                degree: vec![1; n],
                entries: vec![(vec![1; n], k)],
            },
            field.one(),
        )],
    )
}

/// `prod_i t_{e_i}` in degree `1_n`.
pub fn volume_form<F: Field>(field: &F, n: usize) -> MultiMatrixChain<F::Elem> {
    let mut entries: Vec<(MultiIndex, usize)> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            (e, 1)
        })
        .collect();
    entries.sort();
    MultiMatrixChain::from_terms(
        field,
        vec![(
            MultiMatrix {
                degree: vec![1; n],
                entries,
            },
            field.one(),
        )],
    )
}

type Q = <Rationals as Field>::Elem;

/// The reduced complex of `Q[t]` (presented through weight `cap`) over the n-torus.
pub fn rational_torus(n: usize, cap: u32, max_degree: usize) -> Result<TotalComplex<Rationals>, TorusError> {
    TotalComplex::new(n, poly_weight_capped(Rationals, cap.max(1)), true, max_degree)
}

/// Result of [`split_move_witness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMove<E> {
    pub witness: MultiMatrixChain<E>,
    pub boundary: MultiMatrixChain<E>,
    /// `x_{(a,0)} y_{(b,1)} - x_{(a,1)} y_{(b,1)} + x_{(a,1)} y_{(b,0)}`
    pub three_term: MultiMatrixChain<E>,
    /// Sign with `boundary = sign * three_term`.
    pub sign: i64,
    pub holds: bool,
}

fn with_place(a: &[usize], place: usize, value: usize) -> MultiIndex {
    let mut v = a.to_vec();
    v[place] = value;
    v
}

/// The split move in place `place`: with `x` at `v` and `y` at `w`, both `1`
/// in that place, and further entries `rest` that are `0` there, the element
/// with `y` moved to coordinate `2` bounds the three-term difference up to
/// the sign `(-1)^place`.
fn split_in_place<F: Field>(
    tc: &TotalComplex<F>,
    x: (MultiIndex, usize),
    y: (MultiIndex, usize),
    rest: &[(MultiIndex, usize)],
    place: usize,
) -> Result<SplitMove<F::Elem>, TorusError> {
    let f = tc.field();
    let n = tc.n();
    let flat = vec![1; n];
    let raised = with_place(&flat, place, 2);
    let with = |extra: Vec<(MultiIndex, usize)>, degree: &[usize]| {
        let mut e = extra;
        e.extend(rest.iter().cloned());
        tc.assemble(degree, &e)
    };
    let witness = with(vec![x.clone(), (with_place(&y.0, place, 2), y.1)], &raised)?;
    let a = with(vec![(with_place(&x.0, place, 0), x.1), y.clone()], &flat)?;
    let b = with(vec![x.clone(), y.clone()], &flat)?;
    let c = with(vec![x.clone(), (with_place(&y.0, place, 0), y.1)], &flat)?;
    let project = |ch: MultiMatrixChain<F::Elem>| {
        MultiMatrixChain::from_terms(f, ch.terms.into_iter().filter(|(m, _)| tc.is_normalized(m)).collect())
    };
    let witness = project(witness);
    let three_term = project(a.sub(f, &b).add(f, &c));
    let boundary = tc.boundary(&witness)?;
    let sign = if place % 2 == 1 { -1 } else { 1 };
    let holds = boundary == three_term.scale(f, &f.from_i64(sign));
    Ok(SplitMove {
        witness,
        boundary,
        three_term,
        sign,
        holds,
    })
}

/// The split moving lemma for `x_{(a,1)} · y_{(b,1)}` on `T^n`, `n = a.len() + 1`,
/// in the reduced complex of `Q[t]`; `x` and `y` are exponents of `t`.
pub fn split_move_witness(x: usize, a: &[usize], y: usize, b: &[usize]) -> Result<SplitMove<Q>, TorusError> {
    if a.len() != b.len() || a.iter().chain(b).any(|&c| c > 1) {
        return Err(TorusError::Invalid("coordinates must be 0/1 vectors of equal length".into()));
    }
    let n = a.len() + 1;
    let tc = rational_torus(n, (x + y) as u32, n)?;
    let mut va = a.to_vec();
    va.push(1);
    let mut vb = b.to_vec();
    vb.push(1);
    split_in_place(&tc, (va, x), (vb, y), &[], n - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationMode {
    /// `x_v · y_w ~ 0` when `v` and `w` share a zero place.
    Vanishing,
    /// `x_v · y_w ~ sum_{v' <= v, w' <= w, v' + w' = 1_n} x_{v'} · y_{w'}`.
    Pairwise,
    /// `(t^k)_{1_n} ~ sum_{v_1 + ... + v_k = 1_n, v_i != 0} prod t_{v_i}`.
    Power,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedRelation<E> {
    pub description: String,
    /// Left side minus right side; certified when it is a boundary.
    pub difference: MultiMatrixChain<E>,
    pub certified: bool,
    pub witness: Option<MultiMatrixChain<E>>,
    /// Whether iterated split and orthogonal moves reproduce the right side,
    /// every step carrying a verified witness.
    pub rewrite_matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationVerdict<E> {
    pub mode: RelationMode,
    pub n: usize,
    pub k: usize,
    pub relations: Vec<CertifiedRelation<E>>,
    pub all_certified: bool,
}

fn cube(n: usize) -> Vec<MultiIndex> {
    (0..1usize << n).map(|bits| (0..n).map(|i| (bits >> (n - 1 - i)) & 1).collect()).collect()
}

fn fmt_coord(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect()
}

/// A rewriting term: entries `(coordinate, exponent)` in degree `1_n`.
type RewriteTerm = Vec<(MultiIndex, usize)>;

struct Rewriter<'a> {
    tc: &'a TotalComplex<Rationals>,
    steps: usize,
    failed_steps: usize,
}

impl Rewriter<'_> {
    /// All `(v', w')` with `v' <= v`, `w' <= w`, `v' + w' = 1` on `scope`,
    /// by iterated splits; each split's witness is verified.
    fn split_pair(&mut self, x: usize, v: &[usize], y: usize, w: &[usize], scope: &[bool], rest: &[(MultiIndex, usize)]) -> Result<Vec<(MultiIndex, MultiIndex)>, TorusError> {
        let places: Vec<usize> = (0..v.len()).filter(|&i| scope[i]).collect();
        if places.iter().any(|&i| v[i] == 0 && w[i] == 0) {
            return Ok(Vec::new());
        }
        let Some(&i) = places.iter().find(|&&i| v[i] == 1 && w[i] == 1) else {
            return Ok(vec![(v.to_vec(), w.to_vec())]);
        };
        self.steps += 1;
        let mv = split_in_place(self.tc, (v.to_vec(), x), (w.to_vec(), y), rest, i)?;
        if !mv.holds {
            self.failed_steps += 1;
        }
        let mut out = self.split_pair(x, &with_place(v, i, 0), y, w, scope, rest)?;
        out.extend(self.split_pair(x, v, y, &with_place(w, i, 0), scope, rest)?);
        Ok(out)
    }

    /// Splits powers until every entry is `t`; zero-coordinate entries vanish.
    fn expand(&mut self, term: RewriteTerm, out: &mut BTreeMap<RewriteTerm, i64>) -> Result<(), TorusError> {
        if term.iter().any(|(c, _)| c.iter().all(|&x| x == 0)) {
            return Ok(());
        }
        let Some(pos) = term.iter().position(|(_, e)| *e >= 2) else {
            let mut t = term;
            t.sort();
            *out.entry(t).or_insert(0) += 1;
            return Ok(());
        };
        let (c, e) = term[pos].clone();
        let rest: Vec<(MultiIndex, usize)> = term.iter().enumerate().filter(|(k, _)| *k != pos).map(|(_, x)| x.clone()).collect();
        let scope: Vec<bool> = c.iter().map(|&x| x == 1).collect();
        for (a, b) in self.split_pair(1, &c, e - 1, &c, &scope, &rest)? {
            let mut next = rest.clone();
            next.push((a, 1));
            next.push((b, e - 1));
            self.expand(next, out)?;
        }
        Ok(())
    }
}

fn terms_to_chain(tc: &TotalComplex<Rationals>, terms: &BTreeMap<RewriteTerm, i64>) -> Result<MultiMatrixChain<Q>, TorusError> {
    let f = tc.field();
    let flat = vec![1; tc.n()];
    let mut acc = MultiMatrixChain::zero();
    for (t, c) in terms {
        acc = acc.add(f, &tc.assemble(&flat, t)?.scale(f, &f.from_i64(*c)));
    }
    Ok(acc)
}

/// Ordered `k`-tuples of nonzero 0/1 vectors summing to `1_n`, as rewriting terms.
fn power_formula(n: usize, k: usize) -> BTreeMap<RewriteTerm, i64> {
    fn rec(n: usize, left: usize, remaining: usize, cur: &mut Vec<MultiIndex>, out: &mut BTreeMap<RewriteTerm, i64>) {
        if left == 0 {
            if remaining == 0 {
                let mut t: RewriteTerm = cur.iter().map(|v| (v.clone(), 1)).collect();
                t.sort();
                *out.entry(t).or_insert(0) += 1;
            }
            return;
        }
        for bits in 1..1usize << n {
            if bits & !remaining == 0 {
                cur.push((0..n).map(|i| (bits >> (n - 1 - i)) & 1).collect());
                rec(n, left - 1, remaining & !bits, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    rec(n, k, (1usize << n) - 1, &mut Vec::new(), &mut out);
    out
}

fn certify_relation(
    tc: &TotalComplex<Rationals>,
    description: String,
    difference: MultiMatrixChain<Q>,
    rewrite_matches: Option<bool>,
) -> Result<CertifiedRelation<Q>, TorusError> {
    let cert = tc.certify_boundary(&difference)?;
    Ok(CertifiedRelation {
        description,
        difference,
        certified: cert.boundary,
        witness: cert.witness,
        rewrite_matches,
    })
}

/// Certifies the homologous relations of the chosen kind in the reduced
/// complex of `Q[t]` on `T^n`, weight `k`, by boundary witnesses.
pub fn relation_check(n: usize, k: usize, mode: RelationMode) -> Result<RelationVerdict<Q>, TorusError> {
    if n == 0 || k == 0 {
        return Err(TorusError::Invalid("n and k must be positive".into()));
    }
    let tc = rational_torus(n, k as u32, n)?;
    let f = Rationals;
    let flat = vec![1; n];
    let ones = vec![1; n];
    let mut relations = Vec::new();
    match mode {
        RelationMode::Vanishing => {
            for v in cube(n) {
                if v != ones {
                    let lhs = tc.assemble(&flat, &[(v.clone(), k)])?;
                    relations.push(certify_relation(&tc, format!("(t^{k})_{} ~ 0", fmt_coord(&v)), lhs, None)?);
                }
            }
            if k >= 2 {
                for v in cube(n) {
                    for w in cube(n) {
                        if (0..n).any(|i| v[i] == 0 && w[i] == 0) {
                            let lhs = tc.assemble(&flat, &[(v.clone(), 1), (w.clone(), k - 1)])?;
                            relations.push(certify_relation(
                                &tc,
                                format!("t_{} (t^{})_{} ~ 0", fmt_coord(&v), k - 1, fmt_coord(&w)),
                                lhs,
                                None,
                            )?);
                        }
                    }
                }
            }
        }
        RelationMode::Pairwise => {
            if k < 2 {
                return Err(TorusError::Invalid("pairwise relations need k >= 2".into()));
            }
            let scope = vec![true; n];
            for v in cube(n) {
                for w in cube(n) {
                    let lhs = tc.assemble(&flat, &[(v.clone(), 1), (w.clone(), k - 1)])?;
                    let mut closed = BTreeMap::new();
                    for v2 in cube(n) {
                        for w2 in cube(n) {
                            if (0..n).all(|i| v2[i] <= v[i] && w2[i] <= w[i] && v2[i] + w2[i] == 1) {
                                let mut t = vec![(v2.clone(), 1), (w2.clone(), k - 1)];
                                t.sort();
                                *closed.entry(t).or_insert(0) += 1;
                            }
                        }
                    }
                    let rhs = terms_to_chain(&tc, &closed)?;
                    let mut rw = Rewriter {
                        tc: &tc,
                        steps: 0,
                        failed_steps: 0,
                    };
                    let mut rewritten = BTreeMap::new();
                    for (a, b) in rw.split_pair(1, &v, k - 1, &w, &scope, &[])? {
                        let mut t = vec![(a, 1), (b, k - 1)];
                        t.sort();
                        *rewritten.entry(t).or_insert(0) += 1;
                    }
                    let matches = rw.failed_steps == 0 && terms_to_chain(&tc, &rewritten)? == rhs;
                    relations.push(certify_relation(
                        &tc,
                        format!("t_{} (t^{})_{} ~ sum", fmt_coord(&v), k - 1, fmt_coord(&w)),
                        lhs.sub(&f, &rhs),
                        Some(matches),
                    )?);
                }
            }
        }
        RelationMode::Power => {
            let lhs = diagonal_class(&f, n, k);
            let closed = power_formula(n, k);
            let rhs = terms_to_chain(&tc, &closed)?;
            let mut rw = Rewriter {
                tc: &tc,
                steps: 0,
                failed_steps: 0,
            };
            let mut rewritten = BTreeMap::new();
            rw.expand(vec![(ones.clone(), k)], &mut rewritten)?;
            let matches = rw.failed_steps == 0 && terms_to_chain(&tc, &rewritten)? == rhs;
            relations.push(certify_relation(
                &tc,
                format!("(t^{k})_{} ~ sum over {} ordered splittings", fmt_coord(&ones), closed.values().sum::<i64>()),
                lhs.sub(&f, &rhs),
                Some(matches),
            )?);
        }
    }
    let all_certified = relations.iter().all(|r| r.certified && r.rewrite_matches != Some(false));
    Ok(RelationVerdict {
        mode,
        n,
        k,
        relations,
        all_certified,
    })
}

/// `Δ_n(t^k) - c · vol_n` in the reduced complex of `Q[t]`, certified as a boundary or not.
pub fn diagonal_minus_volume(n: usize, k: usize, c: i64) -> Result<CertifiedRelation<Q>, TorusError> {
    let tc = rational_torus(n, k.max(n) as u32, n)?;
    let f = Rationals;
    let mut diff = diagonal_class(&f, n, k);
    if c != 0 {
        diff = diff.sub(&f, &volume_form(&f, n).scale(&f, &f.from_i64(c)));
    }
    let description = if c == 0 {
        format!("(t^{k})_1 on T^{n} is a boundary")
    } else {
        format!("(t^{k})_1 - {c} vol on T^{n} is a boundary")
    };
    certify_relation(&tc, description, diff, None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightClaim {
    pub weight: usize,
    pub coefficient: String,
    pub claim: String,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientVerdict {
    pub n: usize,
    pub lowest: usize,
    pub weights: Vec<WeightClaim>,
    /// Whether the class of the lowest-weight image is nonzero.
    pub leading_class_nonzero: bool,
    pub holds: bool,
}

/// For `q(t) = a_1 t + ... + a_m t^m` (given as `a_0, ..., a_m` with `a_0 = 0`),
/// certifies weight by weight that `a_i (t^i)_{1_n}` is homologous to `a_i`
/// times the sum over ordered splittings of `1_n` into `i` nonzero parts, and
/// checks whether the lowest-weight class survives.
pub fn quotient_poly_image(n: usize, coeffs: &[Q]) -> Result<QuotientVerdict, TorusError> {
    let f = Rationals;
    if coeffs.first().is_some_and(|a0| !f.is_zero(a0)) {
        return Err(TorusError::ConstantTerm);
    }
    let Some(lowest) = (1..coeffs.len()).find(|&i| !f.is_zero(&coeffs[i])) else {
        return Err(TorusError::Invalid("polynomial is zero".into()));
    };
    let m = coeffs.len() - 1;
    let tc = rational_torus(n, m as u32, n)?;
    let mut weights = Vec::new();
    let mut leading_class_nonzero = false;
    for (i, a) in coeffs.iter().enumerate().skip(1) {
        if f.is_zero(a) {
            continue;
        }
        let closed = power_formula(n, i);
        let rhs = terms_to_chain(&tc, &closed)?.scale(&f, a);
        let lhs = diagonal_class(&f, n, i).scale(&f, a);
        let cert = tc.certify_boundary(&lhs.sub(&f, &rhs))?;
        let count: i64 = closed.values().sum();
        weights.push(WeightClaim {
            weight: i,
            coefficient: f.format(a),
            claim: if count == 0 {
                format!("{} (t^{i})_1 ~ 0", f.format(a))
            } else {
                format!("{} (t^{i})_1 ~ {} ordered splittings", f.format(a), count)
            },
            certified: cert.boundary,
        });
        if i == lowest {
            leading_class_nonzero = !rhs.is_zero() && !tc.certify_boundary(&rhs)?.boundary;
        }
    }
    let holds = weights.iter().all(|w| w.certified) && leading_class_nonzero;
    Ok(QuotientVerdict {
        n,
        lowest,
        weights,
        leading_class_nonzero,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::truncated_poly;
    use crate::field::PrimeField;

    fn q(v: i64) -> Q {
        Rationals.from_i64(v)
    }

    #[test]
    fn compositions_cover_all() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(compositions(3, 3).len(), 10);
    }

    #[test]
    fn classes_are_cycles() {
        let f = Rationals;
        for n in 1..=3 {
            let tc = rational_torus(n, n as u32 + 1, n).unwrap();
            assert!(tc.boundary(&volume_form(&f, n)).unwrap().is_zero());
            for k in 1..=n + 1 {
                let d = diagonal_class(&f, n, k);
                assert!(tc.boundary(&d).unwrap().is_zero());
                assert_eq!(tc.grading(&d).unwrap(), Some((n, k as u32)));
            }
        }
        assert_eq!(diagonal_class(&f, 1, 1), volume_form(&f, 1));
    }

    #[test]
    fn split_move_matrix_example() {
        let mv = split_move_witness(1, &[0], 1, &[1]).unwrap();
        assert!(mv.holds);
        assert_eq!(mv.sign, -1);
        assert!(!mv.witness.is_zero());
        assert_eq!(mv.witness.terms[0].0.entries, vec![(vec![0, 1], 1), (vec![1, 2], 1)]);
        let unit = split_move_witness(0, &[1], 2, &[1]).unwrap();
        assert!(unit.holds);
        assert!(unit.three_term.is_zero());
        for a in 0..2 {
            for b in 0..2 {
                assert!(split_move_witness(1, &[a, 1], 2, &[1, b]).unwrap().holds);
            }
        }
    }

    #[test]
    fn power_relations() {
        let r = relation_check(2, 2, RelationMode::Power).unwrap();
        assert!(r.all_certified);
        assert_eq!(r.relations[0].rewrite_matches, Some(true));
        assert!(relation_check(2, 3, RelationMode::Power).unwrap().all_certified);
        assert!(diagonal_minus_volume(2, 2, 2).unwrap().certified);
        assert!(!diagonal_minus_volume(2, 2, 1).unwrap().certified);
        assert!(diagonal_minus_volume(2, 3, 0).unwrap().certified);
        assert!(!diagonal_minus_volume(2, 2, 0).unwrap().certified);
    }

    #[test]
    fn vanishing_and_pairwise() {
        assert!(relation_check(2, 1, RelationMode::Vanishing).unwrap().all_certified);
        assert!(relation_check(2, 2, RelationMode::Vanishing).unwrap().all_certified);
        let p = relation_check(2, 2, RelationMode::Pairwise).unwrap();
        assert!(p.all_certified);
        assert_eq!(p.relations.len(), 16);
    }

    #[test]
    fn quotient_images() {
        let v = quotient_poly_image(1, &[q(0), q(1), q(1)]).unwrap();
        assert!(v.holds);
        assert_eq!(v.lowest, 1);
        let v = quotient_poly_image(2, &[q(0), q(0), q(1), q(2)]).unwrap();
        assert!(v.holds);
        assert_eq!(v.weights[1].claim, "2 (t^3)_1 ~ 0");
        assert_eq!(quotient_poly_image(2, &[q(1), q(1)]).unwrap_err(), TorusError::ConstantTerm);
    }

    #[test]
    fn circle_case_matches_hochschild() {
        let f3 = PrimeField::new(3).unwrap();
        let tc = TotalComplex::new(1, truncated_poly(f3, 2).unwrap(), true, 4).unwrap();
        let weights: Vec<u32> = (0..=tc.weight_bound(5)).collect();
        assert_eq!(tc.homology(4, &weights).unwrap().by_degree(), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn rejects_graded_algebra() {
        let ext = crate::algebra::free_graded_commutative(Rationals, &[crate::algebra::Generator::new("e", 1, 1)], 1, 1).unwrap();
        assert!(matches!(TotalComplex::new(2, ext, true, 2), Err(TorusError::NotCommutative)));
    }
}
