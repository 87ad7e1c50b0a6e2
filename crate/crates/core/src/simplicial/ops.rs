//! Products, wedges and twisted cartesian products.

use super::{
    circle_two_cell, sphere, FiniteGroup, Level, SimplexId, SimplicialAction, SimplicialError, TruncatedSimplicialSet,
    TwistingFunction, TwoCellOrientation,
};

fn same_truncation(x: &TruncatedSimplicialSet, y: &TruncatedSimplicialSet) -> Result<usize, SimplicialError> {
    if x.truncation() != y.truncation() {
        return Err(SimplicialError::TruncationMismatch(x.truncation(), y.truncation()));
    }
    Ok(x.truncation())
}

/// Levelwise product; the simplex `(x, y)` of level q has id `x * |Y_q| + y`.
pub fn product(x: &TruncatedSimplicialSet, y: &TruncatedSimplicialSet) -> Result<TruncatedSimplicialSet, SimplicialError> {
    let n = same_truncation(x, y)?;
    let twist = |_q: usize, _b: SimplexId, f: SimplexId| f;
    Ok(pair_levels(x, y, n, &twist))
}

/// `twisted_d0(q, b, f)` is the fiber component of `d0 (f, b)` given `f' = d0 f`.
fn pair_levels(
    f: &TruncatedSimplicialSet,
    b: &TruncatedSimplicialSet,
    n: usize,
    twisted_d0: &dyn Fn(usize, SimplexId, SimplexId) -> SimplexId,
) -> TruncatedSimplicialSet {
    let mut levels = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let (fs, bs) = (f.level_size(q), b.level_size(q));
        let pairs = || (0..fs as SimplexId).flat_map(move |x| (0..bs as SimplexId).map(move |y| (x, y)));
        let faces = if q == 0 {
            Vec::new()
        } else {
            let lower = b.level_size(q - 1) as SimplexId;
            (0..=q)
                .map(|i| {
                    pairs()
                        .map(|(x, y)| {
                            let fx = f.face(q, i, x);
                            let fx = if i == 0 { twisted_d0(q, y, fx) } else { fx };
                            fx * lower + b.face(q, i, y)
                        })
                        .collect()
                })
                .collect()
        };
        let degeneracies = if q == n {
            Vec::new()
        } else {
            let upper = b.level_size(q + 1) as SimplexId;
            (0..=q)
                .map(|i| pairs().map(|(x, y)| f.degeneracy(q, i, x) * upper + b.degeneracy(q, i, y)).collect())
                .collect()
        };
        let names = pairs().map(|(x, y)| format!("({},{})", f.name(q, x), b.name(q, y))).collect();
        levels.push(Level {
            size: fs * bs,
            faces,
            degeneracies,
            basepoint: f.basepoint(q) * bs as SimplexId + b.basepoint(q),
            nondegenerate: Vec::new(),
            names: Some(names),
        });
    }
    TruncatedSimplicialSet::from_tables(levels).expect("product tables are well formed")
}

/// Disjoint union with basepoints identified. Simplices of `x` keep their ids;
/// non-basepoint simplices of `y` follow in order.
pub fn wedge(x: &TruncatedSimplicialSet, y: &TruncatedSimplicialSet) -> Result<TruncatedSimplicialSet, SimplicialError> {
    let n = same_truncation(x, y)?;
    let embed = |q: usize, s: SimplexId| -> SimplexId {
        let base = y.basepoint(q);
        if s == base {
            x.basepoint(q)
        } else {
            x.level_size(q) as SimplexId + if s > base { s - 1 } else { s }
        }
    };
    let ys = |q: usize| (0..y.level_size(q) as SimplexId).filter(move |&s| s != y.basepoint(q));
    let mut levels = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let faces = if q == 0 {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    let mut t = x.level(q).faces[i].clone();
                    t.extend(ys(q).map(|s| embed(q - 1, y.face(q, i, s))));
                    t
                })
                .collect()
        };
        let degeneracies = if q == n {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    let mut t = x.level(q).degeneracies[i].clone();
                    t.extend(ys(q).map(|s| embed(q + 1, y.degeneracy(q, i, s))));
                    t
                })
                .collect()
        };
        let mut names: Vec<String> = (0..x.level_size(q) as SimplexId).map(|s| x.name(q, s)).collect();
        names.extend(ys(q).map(|s| format!("{}'", y.name(q, s))));
        levels.push(Level {
            size: x.level_size(q) + y.level_size(q) - 1,
            faces,
            degeneracies,
            basepoint: x.basepoint(q),
            nondegenerate: Vec::new(),
            names: Some(names),
        });
    }
    TruncatedSimplicialSet::from_tables(levels)
}

pub fn wedge_all(parts: &[TruncatedSimplicialSet]) -> Result<TruncatedSimplicialSet, SimplicialError> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| SimplicialError::InvalidCell("wedge of nothing".into()))?;
    rest.iter().try_fold(first.clone(), |acc, p| wedge(&acc, p))
}

/// The n-torus as an iterated product of minimal circles.
pub fn torus(n: usize, truncation: usize) -> Result<TruncatedSimplicialSet, SimplicialError> {
    let s1 = sphere(1, truncation)?;
    (1..n).try_fold(s1.clone(), |acc, _| product(&acc, &s1))
}

/// The wedge of `C(n, k)` copies of `S^k` for `k = 1..n`, whose suspension
/// agrees with that of the n-torus.
pub fn torus_cell_bouquet(n: usize, truncation: usize) -> Result<TruncatedSimplicialSet, SimplicialError> {
    let mut parts = Vec::new();
    for k in 1..=n {
        let count = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        let s = sphere(k, truncation)?;
        parts.extend(std::iter::repeat_n(s, count));
    }
    wedge_all(&parts)
}

/// The twisted cartesian product `F x_tau B` with
/// `d0 (f, b) = (tau(b) . d0 f, d0 b)`.
pub fn tcp(
    fiber: &TruncatedSimplicialSet,
    base: &TruncatedSimplicialSet,
    tau: &TwistingFunction,
    action: &SimplicialAction,
) -> Result<TruncatedSimplicialSet, SimplicialError> {
    let n = same_truncation(fiber, base)?;
    if tau.group() != action.group() {
        return Err(SimplicialError::InvalidTwist("twist and action use different groups".into()));
    }
    tau.validate(base)?;
    action.validate(fiber)?;
    let twisted_d0 = |q: usize, b: SimplexId, f0: SimplexId| action.act(tau.value(q, b), q - 1, f0);
    Ok(pair_levels(fiber, base, n, &twisted_d0))
}

/// A twisted cartesian product together with the data that built it.
#[derive(Debug, Clone)]
pub struct TwistedProduct {
    pub fiber: TruncatedSimplicialSet,
    pub base: TruncatedSimplicialSet,
    pub tau: TwistingFunction,
    pub action: SimplicialAction,
    pub total: TruncatedSimplicialSet,
}

/// The Klein bottle as a two-edge circle twisted over the minimal circle,
/// the generator of `C2` swapping the two parallel edges of the fiber.
pub fn klein_bottle(truncation: usize) -> Result<TwistedProduct, SimplicialError> {
    let fiber = circle_two_cell(truncation, TwoCellOrientation::Parallel)?;
    let base = sphere(1, truncation)?;
    let g = FiniteGroup::cyclic(2);
    let a0 = fiber.find(1, "a0").expect("edge a0");
    let a1 = fiber.find(1, "a1").expect("edge a1");
    let action = SimplicialAction::from_nondegenerate(&fiber, g.clone(), |h, q, x| match (h, q) {
        (1, 1) if x == a0 => a1,
        (1, 1) if x == a1 => a0,
        _ => x,
    })?;
    let tau = TwistingFunction::from_edges(&base, g, |_| 1)?;
    let total = tcp(&fiber, &base, &tau, &action)?;
    Ok(TwistedProduct {
        fiber,
        base,
        tau,
        action,
        total,
    })
}

/// The connected `n`-fold cover of the circle: `C_n` translating itself,
/// twisted over the minimal circle by a generator.
pub fn cyclic_cover(n: usize, truncation: usize) -> Result<TwistedProduct, SimplicialError> {
    let g = FiniteGroup::cyclic(n);
    let (fiber, action) = SimplicialAction::left_translation(g.clone(), truncation);
    let base = sphere(1, truncation)?;
    let tau = TwistingFunction::from_edges(&base, g, |_| 1 % n)?;
    let total = tcp(&fiber, &base, &tau, &action)?;
    Ok(TwistedProduct {
        fiber,
        base,
        tau,
        action,
        total,
    })
}
