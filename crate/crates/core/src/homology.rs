//! Exact sparse linear algebra: ranks, boundary solving and homology tables.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{axpy, SparseVec};
use crate::field::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("explicit zero at ({row}, {col})")]
    ExplicitZero { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("target is not a cycle")]
    NotACycle,
    #[error("degree {requested} is above the certified budget {budget}")]
    AboveBudget { requested: usize, budget: usize },
}

/// Column-compressed sparse matrix; each column is sorted by row with no zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix<E> {
    rows: usize,
    columns: Vec<SparseVec<E>>,
}

impl<E: Clone> SparseMatrix<E> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Columns must be sorted, in range and free of zeros (checked in debug builds).
    pub fn from_columns(rows: usize, columns: Vec<SparseVec<E>>) -> Self {
        debug_assert!(columns
            .iter()
            .all(|c| c.windows(2).all(|w| w[0].0 < w[1].0) && c.iter().all(|(r, _)| *r < rows)));
        SparseMatrix { rows, columns }
    }

    pub fn from_triples<F: Field<Elem = E>>(
        field: &F,
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, E)>,
    ) -> Result<Self, HomologyError> {
        let mut columns: Vec<SparseVec<E>> = vec![Vec::new(); cols];
        for (row, col, v) in triples {
            if row >= rows || col >= cols {
                return Err(HomologyError::OutOfBounds { row, col, rows, cols });
            }
            if field.is_zero(&v) {
                return Err(HomologyError::ExplicitZero { row, col });
            }
            axpy(field, &mut columns[col], &field.one(), &vec![(row, v)]);
        }
        Ok(SparseMatrix { rows, columns })
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        SparseMatrix {
            rows: n,
            columns: (0..n).map(|i| vec![(i, field.one())]).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &SparseVec<E> {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec<E>] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn mul_vec<F: Field<Elem = E>>(&self, field: &F, v: &SparseVec<E>) -> SparseVec<E> {
        let mut out = Vec::new();
        for (j, c) in v {
            axpy(field, &mut out, c, &self.columns[*j]);
        }
        out
    }

    /// `self * other`
    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &SparseMatrix<E>) -> Result<SparseMatrix<E>, HomologyError> {
        if self.cols() != other.rows {
            return Err(HomologyError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        Ok(SparseMatrix {
            rows: self.rows,
            columns: other.columns.iter().map(|c| self.mul_vec(field, c)).collect(),
        })
    }

    /// Documented text export: a header `rows cols nnz` followed by one
    /// `row col value` line per entry, columns in order, rows ascending.
    pub fn export_triples<F: Field<Elem = E>>(&self, field: &F) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols(), self.nnz());
        for (r, c, v) in self.triples() {
            writeln!(out, "{r} {c} {}", field.format(v)).unwrap();
        }
        out
    }

    pub fn parse_triples<F: Field<Elem = E>>(field: &F, text: &str) -> Result<Self, HomologyError> {
        let bad = |m: &str| HomologyError::Dimension(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing header"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad header")))
            .collect::<Result<_, _>>()?;
        let [rows, cols, nnz] = header[..] else {
            return Err(bad("header must be `rows cols nnz`"));
        };
        let mut triples = Vec::with_capacity(nnz);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [r, c, v] = parts[..] else {
                return Err(bad("entry must be `row col value`"));
            };
            let r = r.parse().map_err(|_| bad("bad row"))?;
            let c = c.parse().map_err(|_| bad("bad column"))?;
            let v = field.parse(v).map_err(|e| HomologyError::Dimension(e.to_string()))?;
            triples.push((r, c, v));
        }
        if triples.len() != nnz {
            return Err(bad("entry count does not match header"));
        }
        Self::from_triples(field, rows, cols, triples)
    }
}

struct Pivot<E> {
    row: usize,
    column: SparseVec<E>,
    /// Combination of original columns equal to `column`.
    history: Option<SparseVec<E>>,
}

/// Result of exact column elimination. Columns are processed by ascending
/// fill then index; the pivot of a reduced column is its row of smallest
/// original row count, lowest index on ties.
pub struct Reduction<F: Field> {
    field: F,
    rows: usize,
    pivots: Vec<Pivot<F::Elem>>,
    pivot_of_row: Vec<u32>,
    row_weight: Vec<u32>,
    /// Combinations of original columns in the kernel (when tracked).
    kernel: Vec<SparseVec<F::Elem>>,
    track: bool,
}

const NONE: u32 = u32::MAX;

struct Scratch<E> {
    acc: Vec<Option<E>>,
    touched: Vec<usize>,
}

impl<F: Field> Reduction<F> {
    pub fn new(field: &F, m: &SparseMatrix<F::Elem>, track: bool) -> Self {
        let mut row_weight = vec![0u32; m.rows];
        for col in &m.columns {
            for (r, _) in col {
                row_weight[*r] += 1;
            }
        }
        let mut red = Reduction {
            field: field.clone(),
            rows: m.rows,
            pivots: Vec::new(),
            pivot_of_row: vec![NONE; m.rows],
            row_weight,
            kernel: Vec::new(),
            track,
        };
        let mut order: Vec<usize> = (0..m.cols()).collect();
        order.sort_by_key(|&j| (m.columns[j].len(), j));
        let mut scratch = Scratch {
            acc: vec![None; m.rows],
            touched: Vec::new(),
        };
        for j in order {
            let history = track.then(|| vec![(j, field.one())]);
            red.insert(&mut scratch, &m.columns[j], history);
        }
        red
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the pivots; returns the remainder and, when
    /// tracking, the combination of original columns that was subtracted.
    fn reduce(&self, scratch: &mut Scratch<F::Elem>, v: &SparseVec<F::Elem>) -> (SparseVec<F::Elem>, SparseVec<F::Elem>) {
        let f = &self.field;
        let mut heap = BinaryHeap::new();
        for (r, x) in v {
            scratch.acc[*r] = Some(x.clone());
            scratch.touched.push(*r);
            if self.pivot_of_row[*r] != NONE {
                heap.push(Reverse(self.pivot_of_row[*r]));
            }
        }
        let mut used: SparseVec<F::Elem> = Vec::new();
        while let Some(Reverse(k)) = heap.pop() {
            let piv = &self.pivots[k as usize];
            let Some(a) = scratch.acc[piv.row].clone() else { continue };
            let lead = &piv.column.iter().find(|(r, _)| *r == piv.row).expect("pivot entry").1;
            let factor = f.div(&a, lead).expect("pivot is nonzero");
            let neg = f.neg(&factor);
            for (r, x) in &piv.column {
                let slot = &mut scratch.acc[*r];
                match slot {
                    Some(cur) => {
                        f.add_mul_assign(cur, &neg, x);
                        if f.is_zero(cur) {
                            *slot = None;
                        }
                    }
                    None => {
                        *slot = Some(f.mul(&neg, x));
                        scratch.touched.push(*r);
                        let p = self.pivot_of_row[*r];
                        if p != NONE {
                            heap.push(Reverse(p));
                        }
                    }
                }
            }
            debug_assert!(scratch.acc[piv.row].is_none());
            if let Some(h) = &piv.history {
                axpy(f, &mut used, &factor, h);
            }
        }
        scratch.touched.sort_unstable();
        scratch.touched.dedup();
        let mut rest = Vec::new();
        for &r in &scratch.touched {
            if let Some(x) = scratch.acc[r].take() {
                rest.push((r, x));
            }
        }
        scratch.touched.clear();
        (rest, used)
    }

    fn insert(&mut self, scratch: &mut Scratch<F::Elem>, col: &SparseVec<F::Elem>, history: Option<SparseVec<F::Elem>>) {
        let (rest, used) = self.reduce(scratch, col);
        let history = history.map(|mut h| {
            axpy(&self.field, &mut h, &self.field.from_i64(-1), &used);
            h
        });
        if rest.is_empty() {
            if let Some(h) = history {
                self.kernel.push(h);
            }
            return;
        }
        let row = rest
            .iter()
            .map(|(r, _)| *r)
            .min_by_key(|&r| (self.row_weight[r], r))
            .expect("nonempty");
        self.pivot_of_row[row] = self.pivots.len() as u32;
        self.pivots.push(Pivot {
            row,
            column: rest,
            history,
        });
    }

    fn scratch(&self) -> Scratch<F::Elem> {
        Scratch {
            acc: vec![None; self.rows],
            touched: Vec::new(),
        }
    }

    /// Whether `v` lies in the column span.
    pub fn in_span(&self, v: &SparseVec<F::Elem>) -> bool {
        self.reduce(&mut self.scratch(), v).0.is_empty()
    }

    /// A combination `z` of original columns with `M z = v`, if one exists.
    /// Requires tracking.
    pub fn solve(&self, v: &SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        assert!(self.track, "solve requires a tracked reduction");
        let (rest, used) = self.reduce(&mut self.scratch(), v);
        rest.is_empty().then_some(used)
    }

    /// Kernel basis as combinations of original columns. Requires tracking.
    pub fn kernel(&self) -> &[SparseVec<F::Elem>] {
        assert!(self.track, "kernel requires a tracked reduction");
        &self.kernel
    }

    /// Adds a further column (used to grow a span incrementally).
    pub fn push(&mut self, v: &SparseVec<F::Elem>) -> bool {
        let before = self.rank();
        let mut scratch = self.scratch();
        let history = self.track.then(Vec::new);
        self.insert(&mut scratch, v, history);
        self.rank() > before
    }
}

pub fn rank<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> usize {
    Reduction::new(field, m, false).rank()
}

/// Outcome of [`solve_boundary`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundarySolution<E> {
    /// `d z = target`, verified by substitution.
    Witness(SparseVec<E>),
    /// No preimage: the rank grows from `rank` to `rank + 1` when the target is adjoined.
    NotABoundary { rank: usize, rank_with_target: usize },
}

impl<E> BoundarySolution<E> {
    pub fn is_boundary(&self) -> bool {
        matches!(self, BoundarySolution::Witness(_))
    }
}

/// Solves `boundary * z = target`, first checking `cycle_check * target = 0`
/// when the outgoing differential is supplied.
pub fn solve_boundary<F: Field>(
    field: &F,
    boundary: &SparseMatrix<F::Elem>,
    outgoing: Option<&SparseMatrix<F::Elem>>,
    target: &SparseVec<F::Elem>,
) -> Result<BoundarySolution<F::Elem>, HomologyError> {
    if let Some(d) = outgoing {
        if d.cols() != boundary.rows() {
            return Err(HomologyError::Dimension("differentials do not compose".into()));
        }
        if !d.mul_vec(field, target).is_empty() {
            return Err(HomologyError::NotACycle);
        }
    }
    if target.is_empty() {
        return Ok(BoundarySolution::Witness(Vec::new()));
    }
    let red = Reduction::new(field, boundary, true);
    match red.solve(target) {
        Some(z) => {
            assert_eq!(boundary.mul_vec(field, &z), *target, "witness failed re-substitution");
            Ok(BoundarySolution::Witness(z))
        }
        None => Ok(BoundarySolution::NotABoundary {
            rank: red.rank(),
            rank_with_target: red.rank() + 1,
        }),
    }
}

/// Representatives of a basis of `ker d_out / im d_in`.
pub fn homology_representatives<F: Field>(
    field: &F,
    d_in: &SparseMatrix<F::Elem>,
    d_out: &SparseMatrix<F::Elem>,
) -> Vec<SparseVec<F::Elem>> {
    let kernel = Reduction::new(field, d_out, true);
    let mut image = Reduction::new(field, d_in, false);
    let mut reps = Vec::new();
    for z in kernel.kernel() {
        if image.push(z) {
            reps.push(z.clone());
        }
    }
    reps
}

/// `dim C_p - rank d_p - rank d_{p+1}` with `d_p : C_p -> C_{p-1}`.
pub fn homology_dim(chain_dim: usize, rank_out: usize, rank_in: usize) -> usize {
    chain_dim - rank_out - rank_in
}

/// Homology dimensions keyed by (total degree, weight) over a certified range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub max_degree: usize,
    /// `None` when every weight is covered.
    pub max_weight: Option<u32>,
    #[serde(with = "keyed")]
    pub dims: BTreeMap<(usize, u32), usize>,
}

mod keyed {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<(usize, u32), usize>, s: S) -> Result<S::Ok, S::Error> {
        let strs: BTreeMap<String, usize> = m.iter().map(|((d, w), v)| (format!("{d},{w}"), *v)).collect();
        // sort numerically for readability; BTreeMap<String> would sort lexicographically
        let mut entries: Vec<_> = strs.into_iter().collect();
        entries.sort_by_key(|(k, _)| {
            let (d, w) = k.split_once(',').unwrap();
            (d.parse::<usize>().unwrap(), w.parse::<u32>().unwrap())
        });
        s.collect_map(entries)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, u32), usize>, D::Error> {
        let raw: BTreeMap<String, usize> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let (a, b) = k
                    .split_once(',')
                    .ok_or_else(|| serde::de::Error::custom(format!("bad key {k:?}")))?;
                let d = a.trim().parse().map_err(serde::de::Error::custom)?;
                let w = b.trim().parse().map_err(serde::de::Error::custom)?;
                Ok(((d, w), v))
            })
            .collect()
    }
}

impl HomologyTable {
    pub fn new(max_degree: usize, max_weight: Option<u32>) -> Self {
        HomologyTable {
            max_degree,
            max_weight,
            dims: BTreeMap::new(),
        }
    }

    /// Records a dimension; zero entries are kept so the covered cells are explicit.
    pub fn set(&mut self, d: usize, w: u32, dim: usize) {
        self.dims.insert((d, w), dim);
    }

    pub fn add(&mut self, d: usize, w: u32, dim: usize) {
        *self.dims.entry((d, w)).or_insert(0) += dim;
    }

    pub fn get(&self, d: usize, w: u32) -> usize {
        self.dims.get(&(d, w)).copied().unwrap_or(0)
    }

    /// Total dimension per degree, summed over the covered weights.
    pub fn by_degree(&self) -> Vec<usize> {
        let mut out = vec![0; self.max_degree + 1];
        for ((d, _), v) in &self.dims {
            if *d <= self.max_degree {
                out[*d] += v;
            }
        }
        out
    }

    pub fn weights(&self) -> Vec<u32> {
        let mut ws: Vec<u32> = self.dims.keys().map(|(_, w)| *w).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    pub fn restrict(&self, max_degree: usize, max_weight: Option<u32>) -> HomologyTable {
        let mut t = HomologyTable::new(max_degree.min(self.max_degree), max_weight.or(self.max_weight));
        for ((d, w), v) in &self.dims {
            if *d <= max_degree && max_weight.is_none_or(|m| *w <= m) {
                t.set(*d, *w, *v);
            }
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,weight,dim\n");
        for ((d, w), v) in &self.dims {
            writeln!(out, "{d},{w},{v}").unwrap();
        }
        out
    }

    /// Künneth product: dimensions of the tensor product of two graded,
    /// weight-graded vector spaces, truncated at the smaller range.
    pub fn tensor(&self, other: &HomologyTable) -> HomologyTable {
        let max_degree = self.max_degree.min(other.max_degree);
        let max_weight = match (self.max_weight, other.max_weight) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut t = HomologyTable::new(max_degree, max_weight);
        for ((d1, w1), a) in &self.dims {
            for ((d2, w2), b) in &other.dims {
                let (d, w) = (d1 + d2, w1 + w2);
                if d <= max_degree && max_weight.is_none_or(|m| w <= m) {
                    t.add(d, w, a * b);
                }
            }
        }
        t
    }
}

/// Per-cell comparison of two tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableComparison {
    pub equal: bool,
    /// First differing cell in (degree, weight) order: (d, w, left, right).
    pub first_divergence: Option<(usize, u32, usize, usize)>,
    /// Per-degree totals (left, right).
    pub degree_totals: Vec<(usize, usize)>,
    pub cells: Vec<CellVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellVerdict {
    pub degree: usize,
    pub weight: u32,
    pub left: usize,
    pub right: usize,
    pub equal: bool,
}

/// Compares every cell with degree at most `max_degree` and weight at most `max_weight`.
pub fn compare_tables(a: &HomologyTable, b: &HomologyTable, max_degree: usize, max_weight: Option<u32>) -> TableComparison {
    let mut keys: Vec<(usize, u32)> = a.dims.keys().chain(b.dims.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut cells = Vec::new();
    let mut first = None;
    let mut totals = vec![(0, 0); max_degree + 1];
    for (d, w) in keys {
        if d > max_degree || max_weight.is_some_and(|m| w > m) {
            continue;
        }
        let (l, r) = (a.get(d, w), b.get(d, w));
        totals[d].0 += l;
        totals[d].1 += r;
        if l != r && first.is_none() {
            first = Some((d, w, l, r));
        }
        cells.push(CellVerdict {
            degree: d,
            weight: w,
            left: l,
            right: r,
            equal: l == r,
        });
    }
    TableComparison {
        equal: first.is_none(),
        first_divergence: first,
        degree_totals: totals,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use proptest::prelude::*;

    /// Dense Gaussian elimination, independent of the sparse code.
    fn dense_rank<F: Field>(f: &F, rows: usize, cols: usize, entries: &[(usize, usize, F::Elem)]) -> usize {
        let mut m = vec![vec![f.zero(); cols]; rows];
        for (r, c, v) in entries {
            m[*r][*c] = f.add(&m[*r][*c], v);
        }
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !f.is_zero(&m[r][c])) else { continue };
            m.swap(rank, p);
            let inv = f.inv(&m[rank][c]).unwrap();
            for r in 0..rows {
                if r != rank && !f.is_zero(&m[r][c]) {
                    let factor = f.mul(&m[r][c], &inv);
                    for k in 0..cols {
                        let t = f.mul(&factor, &m[rank][k]);
                        m[r][k] = f.sub(&m[r][k], &t);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_and_zero() {
        let q = Rationals;
        assert_eq!(rank(&q, &SparseMatrix::identity(&q, 3)), 3);
        assert_eq!(rank(&q, &SparseMatrix::<num_rational::BigRational>::zero(4, 5)), 0);
    }

    #[test]
    fn rejects_bad_triples() {
        let f = PrimeField::new(5).unwrap();
        assert!(SparseMatrix::from_triples(&f, 2, 2, vec![(2, 0, 1)]).is_err());
        assert!(SparseMatrix::from_triples(&f, 2, 2, vec![(0, 0, 0)]).is_err());
    }

    #[test]
    fn triples_round_trip() {
        let q = Rationals;
        let m = SparseMatrix::from_triples(&q, 3, 2, vec![(0, 0, q.from_i64(2)), (2, 1, q.parse("-1/3").unwrap())]).unwrap();
        let text = m.export_triples(&q);
        assert!(text.starts_with("3 2 2\n"));
        assert_eq!(SparseMatrix::parse_triples(&q, &text).unwrap(), m);
    }

    #[test]
    fn solve_and_certify() {
        let q = Rationals;
        // boundary of a triangle: edges -> vertices
        let d1 = SparseMatrix::from_triples(
            &q,
            3,
            3,
            vec![
                (0, 0, q.from_i64(-1)),
                (1, 0, q.one()),
                (1, 1, q.from_i64(-1)),
                (2, 1, q.one()),
                (0, 2, q.one()),
                (2, 2, q.from_i64(-1)),
            ],
        )
        .unwrap();
        let target = vec![(0, q.from_i64(-1)), (2, q.one())];
        match solve_boundary(&q, &d1, None, &target).unwrap() {
            BoundarySolution::Witness(z) => assert_eq!(d1.mul_vec(&q, &z), target),
            other => panic!("expected witness, got {other:?}"),
        }
        let vertex = vec![(0, q.one())];
        assert_eq!(
            solve_boundary(&q, &d1, None, &vertex).unwrap(),
            BoundarySolution::NotABoundary {
                rank: 2,
                rank_with_target: 3
            }
        );
        assert_eq!(solve_boundary(&q, &d1, None, &Vec::new()).unwrap(), BoundarySolution::Witness(Vec::new()));
        // the cycle check rejects a non-cycle
        let edge = vec![(0, q.one())];
        let d2 = SparseMatrix::zero(3, 0);
        assert_eq!(solve_boundary(&q, &d2, Some(&d1), &edge), Err(HomologyError::NotACycle));
    }

    #[test]
    fn circle_homology_reps() {
        let f = PrimeField::new(3).unwrap();
        let d1 = SparseMatrix::from_triples(&f, 3, 3, vec![(0, 0, 2), (1, 0, 1), (1, 1, 2), (2, 1, 1), (0, 2, 1), (2, 2, 2)]).unwrap();
        let reps = homology_representatives(&f, &SparseMatrix::zero(3, 0), &d1);
        assert_eq!(reps.len(), 1);
        assert!(d1.mul_vec(&f, &reps[0]).is_empty());
    }

    #[test]
    fn table_tools() {
        let mut a = HomologyTable::new(3, Some(2));
        a.set(0, 0, 1);
        a.set(1, 1, 1);
        let mut b = a.clone();
        assert!(compare_tables(&a, &a, 3, None).equal);
        b.set(2, 2, 1);
        let cmp = compare_tables(&a, &b, 3, None);
        assert_eq!(cmp.first_divergence, Some((2, 2, 0, 1)));
        assert_eq!(a.by_degree(), vec![1, 1, 0, 0]);
        let json = serde_json::to_string(&b).unwrap();
        assert!(json.contains("\"2,2\":1"));
        let back: HomologyTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
        assert!(b.to_csv().starts_with("degree,weight,dim\n0,0,1\n"));
        let sq = a.tensor(&a);
        assert_eq!(sq.by_degree(), vec![1, 2, 1, 0]);
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, i64)>)> {
        (1usize..9, 1usize..9).prop_flat_map(|(r, c)| {
            let entries = proptest::collection::vec((0..r, 0..c, -3i64..4), 0..(r * c));
            (Just(r), Just(c), entries)
        })
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense((r, c, entries) in small_matrix(), p in proptest::sample::select(vec![0u64, 2, 3, 7])) {
            fn check<F: Field>(f: &F, r: usize, c: usize, entries: &[(usize, usize, i64)]) -> Result<(), TestCaseError> {
                let elems: Vec<(usize, usize, F::Elem)> = entries.iter().map(|(a, b, v)| (*a, *b, f.from_i64(*v))).collect();
                let mut cols: Vec<SparseVec<F::Elem>> = vec![Vec::new(); c];
                for (a, b, v) in &elems {
                    axpy(f, &mut cols[*b], &f.one(), &vec![(*a, v.clone())]);
                }
                let m = SparseMatrix::from_columns(r, cols);
                prop_assert_eq!(rank(f, &m), dense_rank(f, r, c, &elems));
                let red = Reduction::new(f, &m, true);
                prop_assert_eq!(red.kernel().len(), c - red.rank());
                for z in red.kernel() {
                    prop_assert!(m.mul_vec(f, z).is_empty());
                }
                Ok(())
            }
            if p == 0 {
                check(&Rationals, r, c, &entries)?;
            } else {
                check(&PrimeField::new(p).unwrap(), r, c, &entries)?;
            }
        }

        #[test]
        fn witnesses_resubstitute((r, c, entries) in small_matrix(), coeffs in proptest::collection::vec(-2i64..3, 8)) {
            let f = PrimeField::new(5).unwrap();
            let m = SparseMatrix::from_triples(&f, r, c, {
                let mut seen = std::collections::HashSet::new();
                entries.iter().filter(|(a, b, v)| f.from_i64(*v) != 0 && seen.insert((*a, *b))).map(|(a, b, v)| (*a, *b, f.from_i64(*v))).collect::<Vec<_>>()
            }).unwrap();
            let z: SparseVec<u64> = (0..c).filter_map(|j| {
                let v = f.from_i64(coeffs[j % coeffs.len()]);
                (v != 0).then_some((j, v))
            }).collect();
            let target = m.mul_vec(&f, &z);
            match solve_boundary(&f, &m, None, &target).unwrap() {
                BoundarySolution::Witness(w) => prop_assert_eq!(m.mul_vec(&f, &w), target),
                BoundarySolution::NotABoundary { .. } => prop_assert!(false, "image vector reported as non-boundary"),
            }
        }
    }
}
