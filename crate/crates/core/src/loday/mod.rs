//! Normalized (twisted) Loday chain complexes.
//!
//! A basis element in simplicial degree p is a monomial tensor: a label on
//! some positions of `X_p`, every other position carrying the unit. Labels
//! come from a [`LabelSystem`]; for an ordinary algebra they are basis
//! elements, but the system may also be a simplicial algebra (the fiberwise
//! construction over a twisted product).
//!
//! The complex splits into strands by internal degree `q` (sum of label
//! degrees) and weight `w`; within a strand the simplicial degree `p` is the
//! homological degree and the total degree is `p + q`.

mod constant;
mod fiberwise;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{parity_sign, AlgebraError};
use crate::field::Field;
use crate::homology::{rank, HomologyError, HomologyTable, SparseMatrix};
use crate::simplicial::{FiniteGroup, GroupElem, SimplexId, SimplicialError, TruncatedSimplicialSet, TwistingFunction};

pub use constant::{Coefficients, ConstantLabels, LodaySpec, Twist};
pub use fiberwise::FiberwiseLabels;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LodayError {
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("degree budget {degree} needs truncation at least {needed}, space is truncated at {truncation}")]
    DegreeBudget { degree: usize, needed: usize, truncation: usize },
    #[error("level {level} has more than {limit} basis monomials")]
    BasisLimit { level: usize, limit: usize },
    #[error("a weight budget is required for an algebra presented with overflow")]
    WeightBudgetRequired,
    #[error("d^2 != 0 at simplicial degree {p}, strand (q={q}, w={w})")]
    NonzeroSquare { p: usize, q: u32, w: u32 },
    #[error("face of a basis monomial left the strand: {0}")]
    MissingBasis(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

/// A linear combination of labels; `None` is the unit.
pub type Lin<L, E> = Vec<(Option<L>, E)>;

/// Source of labels for the tensor factors of a Loday construction.
pub trait LabelSystem: Send + Sync {
    type F: Field;
    type Label: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn field(&self) -> &Self::F;
    /// Non-unit labels for non-basepoint positions in simplicial degree `p`.
    fn labels(&self, p: usize) -> Vec<Self::Label>;
    /// Non-unit labels allowed at the basepoint.
    fn base_labels(&self, p: usize) -> Vec<Self::Label>;
    fn degree(&self, l: &Self::Label) -> u32;
    fn weight(&self, l: &Self::Label) -> u32;
    /// Ordered product in degree `p`; at the basepoint the result is a coefficient label.
    fn product(&self, p: usize, factors: &[Self::Label], at_base: bool) -> Result<Lin<Self::Label, <Self::F as Field>::Elem>, LodayError>;
    /// Internal face map of the label algebra, degree `p` to `p - 1`.
    fn face(&self, p: usize, i: usize, l: &Self::Label) -> Result<Lin<Self::Label, <Self::F as Field>::Elem>, LodayError>;
    /// Group action in degree `p`.
    fn act(&self, g: GroupElem, p: usize, l: &Self::Label) -> Lin<Self::Label, <Self::F as Field>::Elem>;
    fn group(&self) -> Option<&FiniteGroup>;
    /// Whether `l` is the image of a label of degree `p - 1` under `s_i`.
    fn in_degeneracy_image(&self, _p: usize, _i: usize, _l: &Self::Label) -> bool {
        true
    }
    /// True when some label can fail [`LabelSystem::in_degeneracy_image`].
    fn labels_escape_degeneracies(&self) -> bool {
        false
    }
    fn label_name(&self, l: &Self::Label) -> String;

    fn is_odd(&self, l: &Self::Label) -> bool {
        self.degree(l) % 2 == 1
    }
}

/// Non-unit entries `(position, label)` sorted by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial<L>(pub Vec<(SimplexId, L)>);

impl<L> Monomial<L> {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }
    pub fn entries(&self) -> &[(SimplexId, L)] {
        &self.0
    }
}

/// A monomial with its simplicial degree and scalar, as exported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialTensor<L, E> {
    pub level: usize,
    pub monomial: Monomial<L>,
    pub coefficient: E,
}

type Elem<S> = <<S as LabelSystem>::F as Field>::Elem;

/// Koszul sign of stably sorting `keys` when only entries flagged odd anticommute.
pub fn koszul_sort_sign<K: Ord>(keys: &[(K, bool)]) -> i64 {
    let mut inversions = 0usize;
    for a in 0..keys.len() {
        if !keys[a].1 {
            continue;
        }
        for b in a + 1..keys.len() {
            if keys[b].1 && keys[a].0 > keys[b].0 {
                inversions += 1;
            }
        }
    }
    parity_sign(inversions % 2 == 1)
}

/// Expands a product of linear combinations of labels.
fn expand<L: Clone, F: Field>(field: &F, factors: Vec<(SimplexId, Lin<L, F::Elem>)>) -> Vec<(Vec<(SimplexId, Option<L>)>, F::Elem)> {
    let mut partial: Vec<(Vec<(SimplexId, Option<L>)>, F::Elem)> = vec![(Vec::with_capacity(factors.len()), field.one())];
    for (y, lin) in factors {
        if lin.len() == 1 {
            let (l, c) = &lin[0];
            for (list, coeff) in partial.iter_mut() {
                list.push((y, l.clone()));
                if !field.is_one(c) {
                    *coeff = field.mul(coeff, c);
                }
            }
            continue;
        }
        let mut next = Vec::with_capacity(partial.len() * lin.len());
        for (list, coeff) in &partial {
            for (l, c) in &lin {
                let mut l2 = list.clone();
                l2.push((y, l.clone()));
                next.push((l2, field.mul(coeff, c)));
            }
        }
        partial = next;
    }
    partial
}

/// Per-level data of the normalized basis.
struct LevelBasis<L> {
    strands: BTreeMap<(u32, u32), StrandLevel<L>>,
}

pub struct StrandLevel<L> {
    pub basis: Vec<Monomial<L>>,
    index: HashMap<Monomial<L>, u32>,
}

/// One strand `(q, w)`: chain groups and differentials in each simplicial degree.
pub struct Strand<E> {
    pub q: u32,
    pub w: u32,
    /// `dims[p] = dim C_p`.
    pub dims: Vec<usize>,
    /// `differentials[p] : C_p -> C_{p-1}`; index 0 is the zero map.
    pub differentials: Vec<SparseMatrix<E>>,
}

impl<E: Clone> Strand<E> {
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }
}

pub struct LodayComplex<S: LabelSystem> {
    space: Arc<TruncatedSimplicialSet>,
    system: S,
    tau: Option<TwistingFunction>,
    degree_budget: usize,
    weight_budget: Option<u32>,
    normalized: bool,
    basis_limit: usize,
    /// `free[p][x]`: bitmask of the `i` with `x` outside the image of `s_i`.
    free: Vec<Vec<u64>>,
    levels: Vec<OnceLock<Result<Arc<LevelBasis<S::Label>>, LodayError>>>,
    strands: Mutex<BTreeMap<(u32, u32), Arc<Strand<Elem<S>>>>>,
}

pub const DEFAULT_BASIS_LIMIT: usize = 4_000_000;

impl<S: LabelSystem> LodayComplex<S> {
    /// Normalized complex through total degree `degree_budget + 1`.
    pub fn with_system(
        space: Arc<TruncatedSimplicialSet>,
        system: S,
        tau: Option<TwistingFunction>,
        degree_budget: usize,
        weight_budget: Option<u32>,
    ) -> Result<Self, LodayError> {
        let n = space.truncation();
        if degree_budget + 1 > n {
            return Err(LodayError::DegreeBudget {
                degree: degree_budget,
                needed: degree_budget + 1,
                truncation: n,
            });
        }
        if n > 63 {
            return Err(LodayError::Unsupported("truncation above 63".into()));
        }
        if let Some(t) = &tau {
            t.validate(&space)?;
            if system.group() != Some(t.group()) {
                return Err(LodayError::Unsupported("twist group differs from the algebra action group".into()));
            }
        }
        let free = (0..=n)
            .map(|p| {
                let mut masks = vec![0u64; space.level_size(p)];
                for (i, comp) in space.degeneracy_complements(p).iter().enumerate() {
                    for &x in comp {
                        masks[x as usize] |= 1 << i;
                    }
                }
                masks
            })
            .collect();
        Ok(LodayComplex {
            levels: (0..=degree_budget + 1).map(|_| OnceLock::new()).collect(),
            space,
            system,
            tau,
            degree_budget,
            weight_budget,
            normalized: true,
            basis_limit: DEFAULT_BASIS_LIMIT,
            free,
            strands: Mutex::new(BTreeMap::new()),
        })
    }

    /// Switches to the unnormalized (Moore) complex; only sensible for tiny inputs.
    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn with_basis_limit(mut self, limit: usize) -> Self {
        self.basis_limit = limit;
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn system(&self) -> &S {
        &self.system
    }

    pub fn space(&self) -> &TruncatedSimplicialSet {
        &self.space
    }

    pub fn degree_budget(&self) -> usize {
        self.degree_budget
    }

    pub fn weight_budget(&self) -> Option<u32> {
        self.weight_budget
    }

    pub fn field(&self) -> &S::F {
        self.system.field()
    }

    /// Whether a monomial in degree `p` survives in the normalized quotient.
    pub fn is_normalized_monomial(&self, p: usize, m: &Monomial<S::Label>) -> bool {
        if p == 0 {
            return true;
        }
        let full = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
        let mut covered = 0u64;
        for (x, l) in &m.0 {
            covered |= self.free[p][*x as usize];
            if self.system.labels_escape_degeneracies() {
                for i in 0..p {
                    if !self.system.in_degeneracy_image(p, i, l) {
                        covered |= 1 << i;
                    }
                }
            }
        }
        covered == full
    }

    fn level(&self, p: usize) -> Result<Arc<LevelBasis<S::Label>>, LodayError> {
        if p >= self.levels.len() {
            return Err(LodayError::DegreeBudget {
                degree: p,
                needed: p,
                truncation: self.levels.len() - 1,
            });
        }
        self.levels[p].get_or_init(|| self.enumerate_level(p).map(Arc::new)).clone()
    }

    fn enumerate_level(&self, p: usize) -> Result<LevelBasis<S::Label>, LodayError> {
        let size = self.space.level_size(p);
        let base = self.space.basepoint(p);
        let q_max = (self.degree_budget + 1 - p) as u32;
        let w_max = self.weight_budget.unwrap_or(u32::MAX);
        let annotate = |ls: Vec<S::Label>| -> Vec<(S::Label, u32, u32, u64)> {
            ls.into_iter()
                .map(|l| {
                    let (d, w) = (self.system.degree(&l), self.system.weight(&l));
                    let mut escape = 0u64;
                    if self.normalized && self.system.labels_escape_degeneracies() {
                        for i in 0..p {
                            if !self.system.in_degeneracy_image(p, i, &l) {
                                escape |= 1 << i;
                            }
                        }
                    }
                    (l, d, w, escape)
                })
                .filter(|(_, d, w, _)| *d <= q_max && *w <= w_max)
                .collect()
        };
        let labels = annotate(self.system.labels(p));
        let base_labels = annotate(self.system.base_labels(p));
        let full = if p == 0 || !self.normalized { 0 } else { (1u64 << p) - 1 };
        // suffix[x]: coverage still reachable from positions >= x
        let mut suffix = vec![0u64; size + 1];
        for x in (0..size).rev() {
            let escape = if self.system.labels_escape_degeneracies() { full } else { 0 };
            suffix[x] = suffix[x + 1] | self.free[p][x] | escape;
        }

        struct Ctx<'a, L> {
            labels: &'a [(L, u32, u32, u64)],
            base_labels: &'a [(L, u32, u32, u64)],
            base: usize,
            size: usize,
            free: &'a [u64],
            suffix: &'a [u64],
            full: u64,
            q_max: u32,
            w_max: u32,
            limit: usize,
            count: usize,
            out: BTreeMap<(u32, u32), Vec<Monomial<L>>>,
        }
        fn dfs<L: Clone + Ord>(c: &mut Ctx<'_, L>, x: usize, cur: &mut Vec<(SimplexId, L)>, q: u32, w: u32, covered: u64) -> bool {
            if (covered | c.suffix[x]) & c.full != c.full {
                return true;
            }
            if x == c.size {
                if covered & c.full != c.full {
                    return true;
                }
                c.count += 1;
                if c.count > c.limit {
                    return false;
                }
                c.out.entry((q, w)).or_default().push(Monomial(cur.clone()));
                return true;
            }
            if !dfs(c, x + 1, cur, q, w, covered) {
                return false;
            }
            let choices = if x == c.base { c.base_labels } else { c.labels };
            for i in 0..choices.len() {
                let (l, d, wt, escape) = &choices[i];
                let (q2, w2) = (q + d, w.saturating_add(*wt));
                if q2 > c.q_max || w2 > c.w_max {
                    continue;
                }
                cur.push((x as SimplexId, l.clone()));
                let ok = dfs(c, x + 1, cur, q2, w2, covered | c.free[x] | escape);
                cur.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        let mut ctx = Ctx {
            labels: &labels,
            base_labels: &base_labels,
            base: base as usize,
            size,
            free: &self.free[p],
            suffix: &suffix,
            full,
            q_max,
            w_max,
            limit: self.basis_limit,
            count: 0,
            out: BTreeMap::new(),
        };
        if !dfs(&mut ctx, 0, &mut Vec::new(), 0, 0, 0) {
            return Err(LodayError::BasisLimit {
                level: p,
                limit: self.basis_limit,
            });
        }
        let strands = ctx
            .out
            .into_iter()
            .filter(|((q, _), _)| *q <= q_max)
            .map(|(k, basis)| {
                let index = basis.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
                (k, StrandLevel { basis, index })
            })
            .collect();
        Ok(LevelBasis { strands })
    }

    /// Normalized monomials in simplicial degree `p` and weight `w`, in canonical order.
    pub fn enumerate_basis(&self, p: usize, w: u32) -> Result<Vec<Monomial<S::Label>>, LodayError> {
        if let Some(wb) = self.weight_budget {
            if w > wb {
                return Err(LodayError::Unsupported(format!("weight {w} above budget {wb}")));
            }
        }
        let level = self.level(p)?;
        Ok(level
            .strands
            .iter()
            .filter(|((_, ww), _)| *ww == w)
            .flat_map(|(_, s)| s.basis.iter().cloned())
            .collect())
    }

    /// Strand keys `(q, w)` present in simplicial degree `p`.
    pub fn strand_keys(&self, p: usize) -> Result<Vec<(u32, u32)>, LodayError> {
        Ok(self.level(p)?.strands.keys().copied().collect())
    }

    /// All strand keys with `q <= degree_budget`.
    pub fn all_strand_keys(&self) -> Result<Vec<(u32, u32)>, LodayError> {
        let mut keys = Vec::new();
        for p in 0..=self.degree_budget + 1 {
            keys.extend(self.strand_keys(p)?);
        }
        keys.retain(|(q, _)| *q as usize <= self.degree_budget);
        keys.sort_unstable();
        keys.dedup();
        Ok(keys)
    }

    /// `d_i` of a monomial in degree `p`, without the simplicial sign `(-1)^i`.
    /// Degenerate results are kept.
    pub fn face_terms(&self, p: usize, m: &Monomial<S::Label>, i: usize) -> Result<Vec<(Monomial<S::Label>, Elem<S>)>, LodayError> {
        let f = self.field();
        let sys = &self.system;
        let base = self.space.basepoint(p - 1);
        let mut factors = Vec::with_capacity(m.0.len());
        for (x, l) in &m.0 {
            let y = self.space.face(p, i, *x);
            let mut lin = sys.face(p, i, l)?;
            if i == 0 {
                if let Some(tau) = &self.tau {
                    let g = tau.value(p, *x);
                    if g != tau.group().identity() {
                        let mut acted = Vec::new();
                        for (l2, c) in lin {
                            match l2 {
                                None => acted.push((None, c)),
                                Some(l2) => {
                                    for (l3, c3) in sys.act(g, p - 1, &l2) {
                                        acted.push((l3, f.mul(&c, &c3)));
                                    }
                                }
                            }
                        }
                        lin = acted;
                    }
                }
            }
            factors.push((y, lin));
        }
        let mut out: Vec<(Monomial<S::Label>, Elem<S>)> = Vec::new();
        for (list, coeff) in expand(f, factors) {
            let entries: Vec<(SimplexId, S::Label)> = list.into_iter().filter_map(|(y, l)| l.map(|l| (y, l))).collect();
            for (mono, c) in multiply_grouped(sys, p - 1, base, entries)? {
                out.push((mono, f.mul(&coeff, &c)));
            }
        }
        Ok(combine(f, out))
    }

    /// The differential `sum (-1)^i d_i` of a monomial, re-expanded in the
    /// basis of degree `p - 1` (degenerate monomials dropped when normalized).
    pub fn differential_of(&self, p: usize, m: &Monomial<S::Label>) -> Result<Vec<(Monomial<S::Label>, Elem<S>)>, LodayError> {
        let f = self.field();
        let mut all = Vec::new();
        for i in 0..=p {
            let s = f.from_i64(parity_sign(i % 2 == 1));
            for (mono, c) in self.face_terms(p, m, i)? {
                if self.normalized && !self.is_normalized_monomial(p - 1, &mono) {
                    continue;
                }
                all.push((mono, f.mul(&c, &s)));
            }
        }
        Ok(combine(f, all))
    }

    /// Internal degree and weight.
    pub fn monomial_grading(&self, m: &Monomial<S::Label>) -> (u32, u32) {
        m.0.iter().fold((0, 0), |(q, w), (_, l)| (q + self.system.degree(l), w + self.system.weight(l)))
    }

    /// The strand `(q, w)` with differentials in every simplicial degree
    /// up to `degree_budget + 1 - q`; `d^2 = 0` is verified.
    pub fn strand(&self, q: u32, w: u32) -> Result<Arc<Strand<Elem<S>>>, LodayError> {
        if let Some(s) = self.strands.lock().unwrap().get(&(q, w)) {
            return Ok(s.clone());
        }
        let top = (self.degree_budget + 1).saturating_sub(q as usize);
        let f = self.field();
        let mut levels: Vec<Arc<LevelBasis<S::Label>>> = Vec::with_capacity(top + 1);
        for p in 0..=top {
            levels.push(self.level(p)?);
        }
        let empty = StrandLevel {
            basis: Vec::new(),
            index: HashMap::new(),
        };
        let get = |p: usize| levels[p].strands.get(&(q, w)).unwrap_or(&empty);
        let dims: Vec<usize> = (0..=top).map(|p| get(p).basis.len()).collect();
        let mut differentials = vec![SparseMatrix::zero(0, dims[0])];
        for p in 1..=top {
            let (src, dst) = (get(p), get(p - 1));
            let columns: Result<Vec<_>, LodayError> = src
                .basis
                .par_iter()
                .map(|m| {
                    let mut col = Vec::new();
                    for (mono, c) in self.differential_of(p, m)? {
                        match dst.index.get(&mono) {
                            Some(&r) => col.push((r as usize, c)),
                            None => {
                                return Err(LodayError::MissingBasis(format!(
                                    "{} -> {} (grading {:?})",
                                    self.format_monomial(p, m),
                                    self.format_monomial(p - 1, &mono),
                                    self.monomial_grading(&mono)
                                )))
                            }
                        }
                    }
                    col.sort_by_key(|(r, _)| *r);
                    Ok(col)
                })
                .collect();
            differentials.push(SparseMatrix::from_columns(dst.basis.len(), columns?));
        }
        for p in 2..=top {
            let sq = differentials[p - 1].mul(f, &differentials[p])?;
            if !sq.is_zero() {
                return Err(LodayError::NonzeroSquare { p, q, w });
            }
        }
        let strand = Arc::new(Strand { q, w, dims, differentials });
        self.strands.lock().unwrap().insert((q, w), strand.clone());
        Ok(strand)
    }

    /// Homology dimensions per (total degree, weight) through the degree budget.
    pub fn homology(&self) -> Result<HomologyTable, LodayError> {
        let keys = self.all_strand_keys()?;
        let results: Result<Vec<((u32, u32), Vec<usize>)>, LodayError> = keys
            .par_iter()
            .map(|&(q, w)| {
                let s = self.strand(q, w)?;
                Ok(((q, w), strand_homology(self.field(), &s)))
            })
            .collect();
        let mut table = HomologyTable::new(self.degree_budget, self.weight_budget);
        if let Some(wb) = self.weight_budget {
            for d in 0..=self.degree_budget {
                for w in 0..=wb {
                    table.set(d, w, 0);
                }
            }
        }
        for ((q, w), hs) in results? {
            for (p, h) in hs.iter().enumerate() {
                let d = p + q as usize;
                if d <= self.degree_budget {
                    table.add(d, w, *h);
                }
            }
        }
        Ok(table)
    }

    /// Chain dimensions per (total degree, weight) for total degree up to `degree_budget + 1`.
    pub fn chain_dims(&self) -> Result<BTreeMap<(usize, u32), usize>, LodayError> {
        let mut out = BTreeMap::new();
        for p in 0..=self.degree_budget + 1 {
            for ((q, w), s) in &self.level(p)?.strands {
                let d = p + *q as usize;
                if d <= self.degree_budget + 1 {
                    *out.entry((d, *w)).or_insert(0) += s.basis.len();
                }
            }
        }
        Ok(out)
    }

    /// Chain dimensions per (simplicial degree, internal degree, weight).
    pub fn block_dims(&self) -> Result<BTreeMap<(usize, u32, u32), usize>, LodayError> {
        let mut out = BTreeMap::new();
        for p in 0..=self.degree_budget + 1 {
            for ((q, w), s) in &self.level(p)?.strands {
                out.insert((p, *q, *w), s.basis.len());
            }
        }
        Ok(out)
    }

    /// Basis and differential of the total-degree block `(d, w)`, as the direct
    /// sum of the strands it meets. Rows index the block `(d - 1, w)`.
    pub fn total_block(&self, d: usize, w: u32) -> Result<(Vec<MonomialTensor<S::Label, Elem<S>>>, SparseMatrix<Elem<S>>), LodayError> {
        if d > self.degree_budget + 1 {
            return Err(HomologyError::AboveBudget {
                requested: d,
                budget: self.degree_budget + 1,
            }
            .into());
        }
        let f = self.field();
        let mut basis = Vec::new();
        let mut columns = Vec::new();
        let mut row_offset = 0;
        for q in 0..=d as u32 {
            let p = d - q as usize;
            let s = self.strand(q, w)?;
            if p > s.top() {
                continue;
            }
            let lvl = self.level(p)?;
            if let Some(sl) = lvl.strands.get(&(q, w)) {
                for m in &sl.basis {
                    basis.push(MonomialTensor {
                        level: p,
                        monomial: m.clone(),
                        coefficient: f.one(),
                    });
                }
            }
            if p >= 1 {
                for col in s.differentials[p].columns() {
                    columns.push(col.iter().map(|(r, c)| (r + row_offset, c.clone())).collect());
                }
                row_offset += s.dims[p - 1];
            } else {
                columns.extend(std::iter::repeat_n(Vec::new(), s.dims[0]));
            }
        }
        Ok((basis, SparseMatrix::from_columns(row_offset, columns)))
    }

    /// Bitmask of the `i` for which position `x` of degree `p` is not in the image of `s_i`.
    pub fn free_mask(&self, p: usize, x: SimplexId) -> u64 {
        self.free[p][x as usize]
    }

    pub fn format_monomial(&self, p: usize, m: &Monomial<S::Label>) -> String {
        if m.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = m
            .0
            .iter()
            .map(|(x, l)| format!("{}@{}", self.system.label_name(l), self.space.name(p, *x)))
            .collect();
        parts.join(" ⊗ ")
    }

    /// Looks up a monomial's row index within its strand.
    pub fn basis_index(&self, p: usize, m: &Monomial<S::Label>) -> Result<Option<(u32, u32, usize)>, LodayError> {
        let (q, w) = self.monomial_grading(m);
        let lvl = self.level(p)?;
        Ok(lvl.strands.get(&(q, w)).and_then(|s| s.index.get(m)).map(|&i| (q, w, i as usize)))
    }
}

/// Homology dimensions of a strand in each simplicial degree below its top.
pub fn strand_homology<F: Field>(field: &F, s: &Strand<F::Elem>) -> Vec<usize> {
    let top = s.top();
    let ranks: Vec<usize> = (0..=top)
        .map(|p| if p == 0 { 0 } else { rank(field, &s.differentials[p]) })
        .collect();
    (0..top).map(|p| s.dims[p] - ranks[p] - ranks[p + 1]).collect()
}

/// Reorders `(position, label)` entries by position with the Koszul sign and
/// multiplies labels sharing a position, in their original order.
pub fn multiply_grouped<S: LabelSystem>(
    sys: &S,
    p: usize,
    base: SimplexId,
    entries: Vec<(SimplexId, S::Label)>,
) -> Result<Vec<(Monomial<S::Label>, Elem<S>)>, LodayError> {
    let f = sys.field();
    let keys: Vec<(SimplexId, bool)> = entries.iter().map(|(y, l)| (*y, sys.is_odd(l))).collect();
    let sign = f.from_i64(koszul_sort_sign(&keys));
    let mut sorted = entries;
    sorted.sort_by_key(|(y, _)| *y);
    let mut groups: Vec<(SimplexId, Lin<S::Label, Elem<S>>)> = Vec::new();
    let mut k = 0;
    while k < sorted.len() {
        let y = sorted[k].0;
        let mut end = k + 1;
        while end < sorted.len() && sorted[end].0 == y {
            end += 1;
        }
        let lin = if end == k + 1 && y != base {
            vec![(Some(sorted[k].1.clone()), f.one())]
        } else {
            let labels: Vec<S::Label> = sorted[k..end].iter().map(|(_, l)| l.clone()).collect();
            sys.product(p, &labels, y == base)?
        };
        if lin.is_empty() {
            return Ok(Vec::new());
        }
        groups.push((y, lin));
        k = end;
    }
    Ok(expand(f, groups)
        .into_iter()
        .map(|(list, c)| (Monomial(list.into_iter().filter_map(|(y, l)| l.map(|l| (y, l))).collect()), f.mul(&sign, &c)))
        .collect())
}

fn combine<L: Ord + Clone, F: Field>(field: &F, mut terms: Vec<(Monomial<L>, F::Elem)>) -> Vec<(Monomial<L>, F::Elem)> {
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Monomial<L>, F::Elem)> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc = field.add(lc, &c),
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !field.is_zero(c));
    out
}

/// Compares homology of the normalized and unnormalized complexes; returns
/// `Ok(false)` on any difference and an error when the Moore complex is larger
/// than `limit` in some simplicial degree.
pub fn compare_full_vs_normalized<F: Field>(spec: &LodaySpec<F>, limit: usize) -> Result<bool, LodayError> {
    let normalized = spec.build()?;
    let full = spec.build()?.unnormalized().with_basis_limit(limit);
    Ok(normalized.homology()? == full.homology()?)
}

#[cfg(test)]
mod tests;
