//! Finite groups, twisting functions and simplicial group actions.

use super::{SimplexId, SimplicialError, TruncatedSimplicialSet};

pub type GroupElem = usize;

/// A finite group given by its multiplication table; elements are `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<GroupElem>>,
    identity: GroupElem,
    inverse: Vec<GroupElem>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(table: Vec<Vec<GroupElem>>) -> Result<Self, SimplicialError> {
        let n = table.len();
        let bad = |m: String| SimplicialError::InvalidGroup(m);
        if n == 0 {
            return Err(bad("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(bad("table is not square or not closed".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| bad("no identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| bad(format!("{a} has no inverse")))?;
            inverse.push(inv);
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverse,
        })
    }

    /// The cyclic group of order `n` with generator `1`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs positive order");
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup {
            table,
            identity: 0,
            inverse: (0..n).map(|a| (n - a) % n).collect(),
        }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> GroupElem {
        self.identity
    }

    pub fn mul(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        self.table[a][b]
    }

    pub fn inv(&self, a: GroupElem) -> GroupElem {
        self.inverse[a]
    }

    pub fn pow(&self, a: GroupElem, k: usize) -> GroupElem {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> {
        0..self.order()
    }

    pub fn table(&self) -> &[Vec<GroupElem>] {
        &self.table
    }
}

/// A twisting function of a base simplicial set into a constant group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistingFunction {
    group: FiniteGroup,
    /// `values[q][b]` for `q >= 1`; `values[0]` is empty.
    values: Vec<Vec<GroupElem>>,
}

impl TwistingFunction {
    pub fn trivial(base: &TruncatedSimplicialSet, group: FiniteGroup) -> Self {
        let e = group.identity();
        let values = (0..=base.truncation())
            .map(|q| if q == 0 { Vec::new() } else { vec![e; base.level_size(q)] })
            .collect();
        TwistingFunction { group, values }
    }

    /// Extends values on nondegenerate 1-simplices to all simplices by
    /// `tau(s0 v) = e` and `tau(b) = tau(d0 b)^-1 tau(d1 b)`, then validates.
    pub fn from_edges(
        base: &TruncatedSimplicialSet,
        group: FiniteGroup,
        edge: impl Fn(SimplexId) -> GroupElem,
    ) -> Result<Self, SimplicialError> {
        let mut values = vec![Vec::new()];
        if base.truncation() >= 1 {
            let level1 = (0..base.level_size(1) as SimplexId)
                .map(|b| if base.is_degenerate(1, b) { group.identity() } else { edge(b) })
                .collect::<Vec<_>>();
            if level1.iter().any(|&g| g >= group.order()) {
                return Err(SimplicialError::InvalidTwist("edge value outside the group".into()));
            }
            values.push(level1);
        }
        for q in 2..=base.truncation() {
            let level = (0..base.level_size(q) as SimplexId)
                .map(|b| {
                    let t0 = values[q - 1][base.face(q, 0, b) as usize];
                    let t1 = values[q - 1][base.face(q, 1, b) as usize];
                    group.mul(group.inv(t0), t1)
                })
                .collect();
            values.push(level);
        }
        let tau = TwistingFunction { group, values };
        tau.validate(base)?;
        Ok(tau)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn value(&self, q: usize, b: SimplexId) -> GroupElem {
        self.values[q][b as usize]
    }

    pub fn is_trivial(&self) -> bool {
        let e = self.group.identity();
        self.values.iter().flatten().all(|&g| g == e)
    }

    /// Checks the four twisting-function identities on every simplex.
    pub fn validate(&self, base: &TruncatedSimplicialSet) -> Result<(), SimplicialError> {
        let n = base.truncation();
        let bad = |m: String| Err(SimplicialError::InvalidTwist(m));
        if self.values.len() != n + 1 || (1..=n).any(|q| self.values[q].len() != base.level_size(q)) {
            return bad("value table does not match the base".into());
        }
        let g = &self.group;
        for q in 0..=n {
            for b in 0..base.level_size(q) as SimplexId {
                if q < n && self.value(q + 1, base.degeneracy(q, 0, b)) != g.identity() {
                    return bad(format!("tau(s0 b) != e for b = {} at level {q}", base.name(q, b)));
                }
                if q == 0 {
                    continue;
                }
                if q < n {
                    for i in 1..=q {
                        if self.value(q + 1, base.degeneracy(q, i, b)) != self.value(q, b) {
                            return bad(format!("tau(s{i} b) != tau(b) for b = {}", base.name(q, b)));
                        }
                    }
                }
                if q >= 2 {
                    let t0 = self.value(q - 1, base.face(q, 0, b));
                    let t1 = self.value(q - 1, base.face(q, 1, b));
                    if self.value(q, b) != g.mul(g.inv(t0), t1) {
                        return bad(format!("tau(b) != tau(d0 b)^-1 tau(d1 b) for b = {}", base.name(q, b)));
                    }
                    for i in 2..=q {
                        if self.value(q - 1, base.face(q, i, b)) != self.value(q, b) {
                            return bad(format!("tau(d{i} b) != tau(b) for b = {}", base.name(q, b)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A left action of a finite group on a simplicial set by simplicial maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialAction {
    group: FiniteGroup,
    /// `perms[g][q][x] = g . x`
    perms: Vec<Vec<Vec<SimplexId>>>,
}

impl SimplicialAction {
    pub fn trivial(space: &TruncatedSimplicialSet, group: FiniteGroup) -> Self {
        let id: Vec<Vec<SimplexId>> = space
            .level_sizes()
            .iter()
            .map(|&s| (0..s as SimplexId).collect())
            .collect();
        let perms = vec![id; group.order()];
        SimplicialAction { group, perms }
    }

    pub fn from_perms(group: FiniteGroup, perms: Vec<Vec<Vec<SimplexId>>>) -> Self {
        SimplicialAction { group, perms }
    }

    /// An action determined by where each group element sends nondegenerate
    /// simplices; degenerate simplices follow via `g . s_i y = s_i (g . y)`.
    pub fn from_nondegenerate(
        space: &TruncatedSimplicialSet,
        group: FiniteGroup,
        image: impl Fn(GroupElem, usize, SimplexId) -> SimplexId,
    ) -> Result<Self, SimplicialError> {
        let mut perms = Vec::with_capacity(group.order());
        for g in group.elements() {
            let mut levels: Vec<Vec<SimplexId>> = Vec::with_capacity(space.truncation() + 1);
            for q in 0..=space.truncation() {
                let level = (0..space.level_size(q) as SimplexId)
                    .map(|x| {
                        if !space.is_degenerate(q, x) {
                            return image(g, q, x);
                        }
                        let i = (0..q)
                            .find(|&i| space.degeneracy(q - 1, i, space.face(q, i, x)) == x)
                            .expect("degenerate simplex lies in some degeneracy image");
                        let y = space.face(q, i, x);
                        space.degeneracy(q - 1, i, levels[q - 1][y as usize])
                    })
                    .collect();
                levels.push(level);
            }
            perms.push(levels);
        }
        let action = SimplicialAction { group, perms };
        action.validate(space)?;
        Ok(action)
    }

    /// Left translation of a group on itself, viewed as a constant simplicial set.
    pub fn left_translation(group: FiniteGroup, truncation: usize) -> (TruncatedSimplicialSet, Self) {
        let space = super::discrete(group.order(), truncation);
        let perms = group
            .elements()
            .map(|g| {
                (0..=truncation)
                    .map(|_| group.elements().map(|h| group.mul(g, h) as SimplexId).collect())
                    .collect()
            })
            .collect();
        (space, SimplicialAction { group, perms })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn act(&self, g: GroupElem, q: usize, x: SimplexId) -> SimplexId {
        self.perms[g][q][x as usize]
    }

    /// Checks bijectivity, compatibility with faces and degeneracies, and the
    /// group law.
    pub fn validate(&self, space: &TruncatedSimplicialSet) -> Result<(), SimplicialError> {
        let bad = |m: String| Err(SimplicialError::InvalidAction(m));
        let n = space.truncation();
        let grp = &self.group;
        if self.perms.len() != grp.order() {
            return bad("one permutation family per group element required".into());
        }
        for g in grp.elements() {
            if self.perms[g].len() != n + 1 {
                return bad(format!("element {g}: wrong number of levels"));
            }
            for q in 0..=n {
                let perm = &self.perms[g][q];
                let size = space.level_size(q);
                let mut seen = vec![false; size];
                if perm.len() != size || perm.iter().any(|&y| y as usize >= size || std::mem::replace(&mut seen[y as usize], true)) {
                    return bad(format!("element {g} is not a bijection at level {q}"));
                }
                for x in 0..size as SimplexId {
                    if q > 0 {
                        for i in 0..=q {
                            if space.face(q, i, self.act(g, q, x)) != self.act(g, q - 1, space.face(q, i, x)) {
                                return bad(format!("element {g} does not commute with d{i} on {}", space.name(q, x)));
                            }
                        }
                    }
                    if q < n {
                        for i in 0..=q {
                            if space.degeneracy(q, i, self.act(g, q, x)) != self.act(g, q + 1, space.degeneracy(q, i, x)) {
                                return bad(format!("element {g} does not commute with s{i} on {}", space.name(q, x)));
                            }
                        }
                    }
                    if g == grp.identity() && self.act(g, q, x) != x {
                        return bad("identity acts nontrivially".into());
                    }
                    for h in grp.elements() {
                        if self.act(g, q, self.act(h, q, x)) != self.act(grp.mul(g, h), q, x) {
                            return bad(format!("group law fails for ({g},{h})"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
