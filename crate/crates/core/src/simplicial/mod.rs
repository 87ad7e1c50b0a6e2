//! Finite pointed simplicial sets stored levelwise up to a truncation level.
//!
//! Every simplex, degenerate or not, is stored explicitly with its face and
//! degeneracy tables. Downstream homology is only certified through degree
//! `truncation - 1`.

mod build;
mod group;
mod ops;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{circle_two_cell, discrete, point, sphere, CellId, CellularBuilder, TwoCellOrientation};
pub use group::{FiniteGroup, GroupElem, SimplicialAction, TwistingFunction};
pub use ops::{cyclic_cover, klein_bottle, product, tcp, torus, torus_cell_bouquet, wedge, wedge_all, TwistedProduct};

pub type SimplexId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("truncation level {truncation} is below the dimension {dim} of a required cell")]
    InvalidTruncation { dim: usize, truncation: usize },
    #[error("truncation levels differ: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("malformed level {level}: {reason}")]
    Malformed { level: usize, reason: String },
    #[error("invalid twisting function: {0}")]
    InvalidTwist(String),
    #[error("group action is not simplicial: {0}")]
    InvalidAction(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid cell: {0}")]
    InvalidCell(String),
}

/// One level `X_q` of a truncated simplicial set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub size: usize,
    /// `faces[i][x] = d_i x` for `0 <= i <= q`; empty at level 0.
    pub faces: Vec<Vec<SimplexId>>,
    /// `degeneracies[i][x] = s_i x` into level `q + 1`; empty at the top level.
    pub degeneracies: Vec<Vec<SimplexId>>,
    pub basepoint: SimplexId,
    pub nondegenerate: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SimplicialSetDoc", into = "SimplicialSetDoc")]
pub struct TruncatedSimplicialSet {
    levels: Vec<Level>,
}

/// Serialized form: `{ "levels": [ { size, faces, degeneracies, basepoint, nondegenerate, names? } ] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplicialSetDoc {
    pub levels: Vec<Level>,
}

impl TryFrom<SimplicialSetDoc> for TruncatedSimplicialSet {
    type Error = SimplicialError;
    fn try_from(doc: SimplicialSetDoc) -> Result<Self, SimplicialError> {
        TruncatedSimplicialSet::from_levels(doc.levels)
    }
}

impl From<TruncatedSimplicialSet> for SimplicialSetDoc {
    fn from(x: TruncatedSimplicialSet) -> Self {
        SimplicialSetDoc { levels: x.levels }
    }
}

impl TruncatedSimplicialSet {
    /// Checks table shapes and index ranges only; simplicial identities are
    /// checked by [`validate`].
    pub fn from_levels(levels: Vec<Level>) -> Result<Self, SimplicialError> {
        if levels.is_empty() {
            return Err(SimplicialError::Malformed {
                level: 0,
                reason: "no levels".into(),
            });
        }
        let top = levels.len() - 1;
        for (q, lvl) in levels.iter().enumerate() {
            let bad = |reason: String| SimplicialError::Malformed { level: q, reason };
            if lvl.size == 0 {
                return Err(bad("empty level".into()));
            }
            if lvl.basepoint as usize >= lvl.size {
                return Err(bad("basepoint out of range".into()));
            }
            if lvl.nondegenerate.len() != lvl.size {
                return Err(bad("nondegenerate flags have wrong length".into()));
            }
            if let Some(names) = &lvl.names {
                if names.len() != lvl.size {
                    return Err(bad("names have wrong length".into()));
                }
            }
            let want_faces = if q == 0 { 0 } else { q + 1 };
            if lvl.faces.len() != want_faces {
                return Err(bad(format!("expected {want_faces} face maps")));
            }
            for (i, table) in lvl.faces.iter().enumerate() {
                let lower = levels[q - 1].size;
                if table.len() != lvl.size || table.iter().any(|&y| y as usize >= lower) {
                    return Err(bad(format!("face map d_{i} malformed")));
                }
            }
            let want_degs = if q == top { 0 } else { q + 1 };
            if lvl.degeneracies.len() != want_degs {
                return Err(bad(format!("expected {want_degs} degeneracy maps")));
            }
            for (i, table) in lvl.degeneracies.iter().enumerate() {
                let upper = levels[q + 1].size;
                if table.len() != lvl.size || table.iter().any(|&y| y as usize >= upper) {
                    return Err(bad(format!("degeneracy map s_{i} malformed")));
                }
            }
        }
        Ok(TruncatedSimplicialSet { levels })
    }

    /// Builds from face/degeneracy tables, deriving the nondegenerate flags
    /// from the degeneracy images.
    pub(crate) fn from_tables(mut levels: Vec<Level>) -> Result<Self, SimplicialError> {
        for q in 0..levels.len() {
            let mut flags = vec![true; levels[q].size];
            if q > 0 {
                for table in &levels[q - 1].degeneracies {
                    for &y in table {
                        flags[y as usize] = false;
                    }
                }
            }
            levels[q].nondegenerate = flags;
        }
        Self::from_levels(levels)
    }

    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, q: usize) -> &Level {
        &self.levels[q]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_size(&self, q: usize) -> usize {
        self.levels[q].size
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.size).collect()
    }

    pub fn face(&self, q: usize, i: usize, x: SimplexId) -> SimplexId {
        self.levels[q].faces[i][x as usize]
    }

    pub fn degeneracy(&self, q: usize, i: usize, x: SimplexId) -> SimplexId {
        self.levels[q].degeneracies[i][x as usize]
    }

    pub fn basepoint(&self, q: usize) -> SimplexId {
        self.levels[q].basepoint
    }

    pub fn is_degenerate(&self, q: usize, x: SimplexId) -> bool {
        !self.levels[q].nondegenerate[x as usize]
    }

    pub fn name(&self, q: usize, x: SimplexId) -> String {
        match &self.levels[q].names {
            Some(names) => names[x as usize].clone(),
            None => format!("x{q}_{x}"),
        }
    }

    /// Looks a simplex up by its display name.
    pub fn find(&self, q: usize, name: &str) -> Option<SimplexId> {
        let names = self.levels[q].names.as_ref()?;
        names.iter().position(|n| n == name).map(|i| i as SimplexId)
    }

    /// Nondegenerate simplices per level.
    pub fn nondegenerate_counts(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|l| l.nondegenerate.iter().filter(|&&b| b).count())
            .collect()
    }

    /// Euler characteristic of the realization, counting nondegenerate
    /// simplices through the truncation level.
    pub fn euler_characteristic(&self) -> i64 {
        self.nondegenerate_counts()
            .iter()
            .enumerate()
            .map(|(q, &c)| if q % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Positions not in the image of `s_i : X_{q-1} -> X_q`, for each `i`.
    pub fn degeneracy_complements(&self, q: usize) -> Vec<Vec<SimplexId>> {
        if q == 0 {
            return Vec::new();
        }
        let size = self.level_size(q);
        self.levels[q - 1]
            .degeneracies
            .iter()
            .map(|table| {
                let mut hit = vec![false; size];
                for &y in table {
                    hit[y as usize] = true;
                }
                (0..size as SimplexId).filter(|&x| !hit[x as usize]).collect()
            })
            .collect()
    }

    /// A copy truncated at a lower level.
    pub fn truncate(&self, n: usize) -> Result<Self, SimplicialError> {
        if n > self.truncation() {
            return Err(SimplicialError::InvalidTruncation {
                dim: n,
                truncation: self.truncation(),
            });
        }
        let mut levels: Vec<Level> = self.levels[..=n].to_vec();
        levels[n].degeneracies.clear();
        Self::from_levels(levels)
    }
}

/// A violated simplicial identity or structural invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub identity: String,
    pub level: usize,
    pub simplex: SimplexId,
    pub detail: String,
}

/// Lists every violated identity; empty iff `x` is a valid truncated
/// pointed simplicial set.
pub fn validate(x: &TruncatedSimplicialSet) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = x.truncation();
    let mut push = |identity: String, level: usize, simplex: SimplexId, detail: String| {
        out.push(Violation {
            identity,
            level,
            simplex,
            detail,
        })
    };

    for q in 0..=n {
        let size = x.level_size(q) as SimplexId;
        for s in 0..size {
            // d_i d_j = d_{j-1} d_i for i < j
            if q >= 2 {
                for j in 1..=q {
                    for i in 0..j {
                        let lhs = x.face(q - 1, i, x.face(q, j, s));
                        let rhs = x.face(q - 1, j - 1, x.face(q, i, s));
                        if lhs != rhs {
                            push(format!("d{i} d{j} = d{} d{i}", j - 1), q, s, format!("{lhs} != {rhs}"));
                        }
                    }
                }
            }
            if q < n {
                for j in 0..=q {
                    let t = x.degeneracy(q, j, s);
                    // d_j s_j = d_{j+1} s_j = id
                    for i in [j, j + 1] {
                        let back = x.face(q + 1, i, t);
                        if back != s {
                            push(format!("d{i} s{j} = id"), q, s, format!("got {back}"));
                        }
                    }
                    for i in 0..=q + 1 {
                        if i == j || i == j + 1 {
                            continue;
                        }
                        let lhs = x.face(q + 1, i, t);
                        let rhs = if i < j {
                            x.degeneracy(q - 1, j - 1, x.face(q, i, s))
                        } else {
                            x.degeneracy(q - 1, j, x.face(q, i - 1, s))
                        };
                        if lhs != rhs {
                            let rhs_name = if i < j {
                                format!("s{} d{i}", j - 1)
                            } else {
                                format!("s{j} d{}", i - 1)
                            };
                            push(format!("d{i} s{j} = {rhs_name}"), q, s, format!("{lhs} != {rhs}"));
                        }
                    }
                    // s_i s_j = s_{j+1} s_i for i <= j
                    if q + 1 < n {
                        for i in 0..=j {
                            let lhs = x.degeneracy(q + 1, i, t);
                            let rhs = x.degeneracy(q + 1, j + 1, x.degeneracy(q, i, s));
                            if lhs != rhs {
                                push(format!("s{i} s{j} = s{} s{i}", j + 1), q, s, format!("{lhs} != {rhs}"));
                            }
                        }
                    }
                }
            }
        }
        if q < n {
            for (i, table) in x.level(q).degeneracies.iter().enumerate() {
                let mut seen = vec![false; x.level_size(q + 1)];
                for (s, &t) in table.iter().enumerate() {
                    if std::mem::replace(&mut seen[t as usize], true) {
                        push(format!("s{i} injective"), q, s as SimplexId, format!("collides at {t}"));
                    }
                }
            }
        }
        // degenerate flag iff in the image of some s_i
        if q > 0 {
            let mut hit = vec![false; x.level_size(q)];
            for table in &x.level(q - 1).degeneracies {
                for &t in table {
                    hit[t as usize] = true;
                }
            }
            for s in 0..size {
                if hit[s as usize] == x.level(q).nondegenerate[s as usize] {
                    push("degenerate flag".into(), q, s, format!("in image of a degeneracy: {}", hit[s as usize]));
                }
            }
        }
        let b = x.basepoint(q);
        if q > 0 {
            for i in 0..=q {
                if x.face(q, i, b) != x.basepoint(q - 1) {
                    push(format!("basepoint closed under d{i}"), q, b, String::new());
                }
            }
        }
        if q < n {
            for i in 0..=q {
                if x.degeneracy(q, i, b) != x.basepoint(q + 1) {
                    push(format!("basepoint closed under s{i}"), q, b, String::new());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_level_sizes() {
        let s1 = sphere(1, 3).unwrap();
        assert_eq!(s1.level_sizes(), vec![1, 2, 3, 4]);
        assert_eq!(s1.nondegenerate_counts(), vec![1, 1, 0, 0]);
        let s2 = sphere(2, 2).unwrap();
        assert_eq!(s2.level_sizes(), vec![1, 1, 2]);
        assert_eq!(s2.nondegenerate_counts(), vec![1, 0, 1]);
        assert!(matches!(sphere(1, 0), Err(SimplicialError::InvalidTruncation { .. })));
    }

    #[test]
    fn sphere_validates() {
        for n in 1..=3 {
            for trunc in n..=5 {
                let s = sphere(n, trunc).unwrap();
                assert!(validate(&s).is_empty(), "S^{n} at {trunc}");
            }
        }
    }

    #[test]
    fn corrupted_face_is_reported() {
        let s = sphere(2, 4).unwrap();
        assert!(validate(&s).is_empty());
        let mut levels = s.levels().to_vec();
        // swap d_0 and d_1 on one degenerate 3-simplex
        let x = (0..levels[3].size).find(|&x| levels[3].faces[0][x] != levels[3].faces[1][x]).unwrap();
        let (a, b) = (levels[3].faces[0][x], levels[3].faces[1][x]);
        levels[3].faces[0][x] = b;
        levels[3].faces[1][x] = a;
        let bad = TruncatedSimplicialSet::from_levels(levels).unwrap();
        let report = validate(&bad);
        assert!(!report.is_empty());
        assert!(report.iter().any(|v| v.identity.starts_with('d')));
    }

    #[test]
    fn malformed_tables_rejected() {
        let s = sphere(1, 2).unwrap();
        let mut levels = s.levels().to_vec();
        levels[1].faces[0].pop();
        assert!(TruncatedSimplicialSet::from_levels(levels).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = circle_two_cell(3, TwoCellOrientation::Cyclic).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: TruncatedSimplicialSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn truncate_lower() {
        let s = sphere(1, 4).unwrap();
        let t = s.truncate(2).unwrap();
        assert_eq!(t.level_sizes(), vec![1, 2, 3]);
        assert!(validate(&t).is_empty());
        assert!(s.truncate(5).is_err());
    }
}
