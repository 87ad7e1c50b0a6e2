//! Simplicial sets generated by finitely many nondegenerate cells.
//!
//! A q-simplex is a pair (cell c of dimension k, monotone surjection
//! [q] -> [k]); this is the Eilenberg-Zilber normal form, so degenerate
//! simplices come out of the construction rather than being listed by hand.

use std::collections::HashMap;

use super::{Level, SimplexId, SimplicialError, TruncatedSimplicialSet};

pub type CellId = usize;

#[derive(Debug, Clone)]
struct Cell {
    name: String,
    dim: usize,
    /// `faces[j]` is `d_j` of the cell as (cell, surjection [dim-1] -> [dim of that cell]).
    faces: Vec<(CellId, Vec<u8>)>,
}

#[derive(Debug, Clone, Default)]
pub struct CellularBuilder {
    cells: Vec<Cell>,
}

impl CellularBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: &str) -> CellId {
        self.cells.push(Cell {
            name: name.to_string(),
            dim: 0,
            faces: Vec::new(),
        });
        self.cells.len() - 1
    }

    pub fn dim(&self, c: CellId) -> usize {
        self.cells[c].dim
    }

    /// The face reference "cell `c` itself".
    pub fn whole(&self, c: CellId) -> (CellId, Vec<u8>) {
        (c, (0..=self.cells[c].dim as u8).collect())
    }

    /// The face reference "cell `c` degenerated by the surjection `map`".
    pub fn degenerate(&self, c: CellId, map: &[u8]) -> (CellId, Vec<u8>) {
        (c, map.to_vec())
    }

    /// The `len - 1`-simplex collapsed onto vertex `v`.
    pub fn collapsed(&self, v: CellId, len: usize) -> (CellId, Vec<u8>) {
        (v, vec![0; len])
    }

    /// Adds a cell of dimension `faces.len() - 1` with the given faces.
    pub fn cell(&mut self, name: &str, faces: Vec<(CellId, Vec<u8>)>) -> Result<CellId, SimplicialError> {
        let dim = faces.len().saturating_sub(1);
        if dim == 0 {
            return Err(SimplicialError::InvalidCell(format!("{name}: a cell needs at least two faces")));
        }
        for (j, (c, map)) in faces.iter().enumerate() {
            let Some(target) = self.cells.get(*c) else {
                return Err(SimplicialError::InvalidCell(format!("{name}: face {j} names unknown cell")));
            };
            if map.len() != dim || !is_surjection(map, target.dim) {
                return Err(SimplicialError::InvalidCell(format!(
                    "{name}: face {j} is not a monotone surjection [{}] -> [{}]",
                    dim - 1,
                    target.dim
                )));
            }
        }
        self.cells.push(Cell {
            name: name.to_string(),
            dim,
            faces,
        });
        Ok(self.cells.len() - 1)
    }

    /// Materializes all simplices through level `truncation`.
    pub fn build(&self, basepoint: CellId, truncation: usize) -> Result<TruncatedSimplicialSet, SimplicialError> {
        if self.cells.get(basepoint).map(|c| c.dim) != Some(0) {
            return Err(SimplicialError::InvalidCell("basepoint must be a vertex".into()));
        }
        if let Some(c) = self.cells.iter().find(|c| c.dim > truncation) {
            return Err(SimplicialError::InvalidTruncation {
                dim: c.dim,
                truncation,
            });
        }
        let mut simplices: Vec<Vec<(CellId, Vec<u8>)>> = Vec::with_capacity(truncation + 1);
        let mut index: Vec<HashMap<(CellId, Vec<u8>), SimplexId>> = Vec::with_capacity(truncation + 1);
        for q in 0..=truncation {
            let mut list = Vec::new();
            for (c, cell) in self.cells.iter().enumerate() {
                if cell.dim <= q {
                    for map in surjections(q, cell.dim) {
                        list.push((c, map));
                    }
                }
            }
            let idx = list.iter().enumerate().map(|(i, s)| (s.clone(), i as SimplexId)).collect();
            simplices.push(list);
            index.push(idx);
        }

        let mut levels = Vec::with_capacity(truncation + 1);
        for q in 0..=truncation {
            let list = &simplices[q];
            let faces = if q == 0 {
                Vec::new()
            } else {
                (0..=q)
                    .map(|i| list.iter().map(|s| index[q - 1][&self.face_of(s, i)]).collect())
                    .collect()
            };
            let degeneracies = if q == truncation {
                Vec::new()
            } else {
                (0..=q)
                    .map(|i| {
                        list.iter()
                            .map(|(c, map)| {
                                let mut m = map.clone();
                                m.insert(i, map[i]);
                                index[q + 1][&(*c, m)]
                            })
                            .collect()
                    })
                    .collect()
            };
            let names = list
                .iter()
                .map(|(c, map)| {
                    let cell = &self.cells[*c];
                    if map.len() == cell.dim + 1 {
                        cell.name.clone()
                    } else {
                        let seq: Vec<String> = map.iter().map(|v| v.to_string()).collect();
                        format!("{}[{}]", cell.name, seq.join(""))
                    }
                })
                .collect();
            levels.push(Level {
                size: list.len(),
                faces,
                degeneracies,
                basepoint: index[q][&(basepoint, vec![0; q + 1])],
                nondegenerate: Vec::new(),
                names: Some(names),
            });
        }
        TruncatedSimplicialSet::from_tables(levels)
    }

    fn face_of(&self, (c, map): &(CellId, Vec<u8>), i: usize) -> (CellId, Vec<u8>) {
        let k = self.cells[*c].dim;
        let mut tau = map.clone();
        let removed = tau.remove(i);
        if is_surjection(&tau, k) {
            return (*c, tau);
        }
        let (c2, rho) = &self.cells[*c].faces[removed as usize];
        let composed = tau
            .iter()
            .map(|&t| rho[if t > removed { t as usize - 1 } else { t as usize }])
            .collect();
        (*c2, composed)
    }
}

fn is_surjection(map: &[u8], k: usize) -> bool {
    !map.is_empty()
        && map[0] == 0
        && *map.last().unwrap() as usize == k
        && map.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
}

/// Monotone surjections [q] -> [k] in decreasing lexicographic order, so the
/// degeneracies of a 1-cell are listed by increasing position of the jump.
fn surjections(q: usize, k: usize) -> Vec<Vec<u8>> {
    fn rec(q: usize, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let last = *cur.last().unwrap() as usize;
        let remaining = q + 1 - cur.len();
        if remaining == 0 {
            if last == k {
                out.push(cur.clone());
            }
            return;
        }
        if last < k {
            cur.push(last as u8 + 1);
            rec(q, k, cur, out);
            cur.pop();
        }
        // stay, if there is still room to reach k
        if k - last < remaining {
            cur.push(last as u8);
            rec(q, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= q {
        rec(q, k, &mut vec![0], &mut out);
    }
    out
}

/// The one-point simplicial set.
pub fn point(truncation: usize) -> TruncatedSimplicialSet {
    let mut b = CellularBuilder::new();
    let v = b.vertex("*");
    b.build(v, truncation).expect("point is always valid")
}

/// A constant simplicial set on `size` points, basepoint `0`.
pub fn discrete(size: usize, truncation: usize) -> TruncatedSimplicialSet {
    let mut b = CellularBuilder::new();
    let first = b.vertex("p0");
    for i in 1..size {
        b.vertex(&format!("p{i}"));
    }
    b.build(first, truncation).expect("discrete set is always valid")
}

/// Minimal model of the n-sphere: one vertex and one n-cell with collapsed boundary.
pub fn sphere(n: usize, truncation: usize) -> Result<TruncatedSimplicialSet, SimplicialError> {
    if n == 0 {
        return Err(SimplicialError::InvalidCell("sphere dimension must be positive".into()));
    }
    if truncation < n {
        return Err(SimplicialError::InvalidTruncation { dim: n, truncation });
    }
    let mut b = CellularBuilder::new();
    let v = b.vertex("*");
    let faces = (0..=n).map(|_| b.collapsed(v, n)).collect();
    b.cell(&format!("s{n}"), faces)?;
    b.build(v, truncation)
}

/// How the two edges of [`circle_two_cell`] are oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwoCellOrientation {
    /// alpha0 runs v0 -> v1 and alpha1 runs v1 -> v0 (the double-cover picture).
    #[default]
    Cyclic,
    /// Both edges run v0 -> v1, so swapping them is simplicial.
    Parallel,
}

/// A circle with two vertices `v0, v1` and two edges `a0, a1`; basepoint `v0`.
pub fn circle_two_cell(truncation: usize, orientation: TwoCellOrientation) -> Result<TruncatedSimplicialSet, SimplicialError> {
    if truncation < 1 {
        return Err(SimplicialError::InvalidTruncation { dim: 1, truncation });
    }
    let mut b = CellularBuilder::new();
    let v0 = b.vertex("v0");
    let v1 = b.vertex("v1");
    // faces are [d0, d1] = [target, source]
    b.cell("a0", vec![b.whole(v1), b.whole(v0)])?;
    match orientation {
        TwoCellOrientation::Cyclic => b.cell("a1", vec![b.whole(v0), b.whole(v1)])?,
        TwoCellOrientation::Parallel => b.cell("a1", vec![b.whole(v1), b.whole(v0)])?,
    };
    b.build(v0, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::validate;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn surjection_counts() {
        for q in 0..7 {
            for k in 0..=q {
                assert_eq!(surjections(q, k).len(), binom(q, k));
            }
        }
        assert!(surjections(2, 3).is_empty());
    }

    #[test]
    fn two_cell_circle_shape() {
        for o in [TwoCellOrientation::Cyclic, TwoCellOrientation::Parallel] {
            let c = circle_two_cell(1, o).unwrap();
            assert_eq!(c.level_sizes(), vec![2, 4]);
            assert_eq!(c.euler_characteristic(), 0);
            let c = circle_two_cell(4, o).unwrap();
            assert!(validate(&c).is_empty());
            assert_eq!(c.level_sizes(), vec![2, 4, 6, 8, 10]);
        }
        assert!(circle_two_cell(0, TwoCellOrientation::Cyclic).is_err());
    }

    #[test]
    fn cyclic_orientation_faces() {
        let c = circle_two_cell(1, TwoCellOrientation::Cyclic).unwrap();
        let a0 = c.find(1, "a0").unwrap();
        let a1 = c.find(1, "a1").unwrap();
        let v0 = c.find(0, "v0").unwrap();
        let v1 = c.find(0, "v1").unwrap();
        assert_eq!((c.face(1, 0, a0), c.face(1, 1, a0)), (v1, v0));
        assert_eq!((c.face(1, 0, a1), c.face(1, 1, a1)), (v0, v1));
    }

    #[test]
    fn discrete_and_point() {
        let p = point(3);
        assert_eq!(p.level_sizes(), vec![1, 1, 1, 1]);
        assert!(validate(&p).is_empty());
        let d = discrete(3, 2);
        assert_eq!(d.level_sizes(), vec![3, 3, 3]);
        assert_eq!(d.euler_characteristic(), 3);
        assert!(validate(&d).is_empty());
    }

    #[test]
    fn bad_cells_rejected() {
        let mut b = CellularBuilder::new();
        let v = b.vertex("v");
        assert!(b.cell("e", vec![b.collapsed(v, 2), b.collapsed(v, 1)]).is_err());
        assert!(b.cell("e", vec![(7, vec![0])]).is_err());
        assert!(b.build(v, 0).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn spheres_valid(n in 1usize..4, extra in 0usize..3) {
            let s = sphere(n, n + extra).unwrap();
            proptest::prop_assert!(validate(&s).is_empty());
            let expected: Vec<usize> = (0..=n + extra).map(|q| 1 + binom(q, n)).collect();
            proptest::prop_assert_eq!(s.level_sizes(), expected);
        }
    }
}
