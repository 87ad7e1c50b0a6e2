//! Expected homology tables, counted from free graded-commutative algebras.
//!
//! Names take optional parameters: `HHn_Q_trunc(n=2,m=3)`.
//!
//! | name | table |
//! |------|-------|
//! | `HH1_Fp_poly` | `Λ(εt)`, `εt` in degree 1, weight 1 |
//! | `HH2_Fp_poly` | divided powers on a degree-2, weight-1 class |
//! | `HHn_Q_poly(n)` | `Λ(x_n)` for odd `n`, `Q[x_n]` for even `n`; weight 1 |
//! | `HHn_Q_trunc(n,m)` | `Λ(x_n) ⊗ Q[y_{n+1}]` for odd `n`, `Q[x_n] ⊗ Λ(y_{n+1})` for even `n`; `x` weight 1, `y` weight `m` |
//! | `bouquet_Q_trunc(n,m)` | tensor product over `k = 1..n` of `C(n,k)` copies of `HHn_Q_trunc(k,m)` |

use std::collections::BTreeMap;

use loday_core::homology::HomologyTable;

use crate::error::{HarnessError, Result};

pub const NAMES: &[&str] = &["HH1_Fp_poly", "HH2_Fp_poly", "HHn_Q_poly", "HHn_Q_trunc", "bouquet_Q_trunc"];

/// A generator of a free graded-commutative algebra; odd ones square to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeGenerator {
    pub degree: usize,
    pub weight: u32,
}

/// Monomial counts of the free graded-commutative algebra on `gens` in
/// degrees up to `max_degree` and weights up to `max_weight`.
pub fn free_table(gens: &[FreeGenerator], max_degree: usize, max_weight: Option<u32>) -> HomologyTable {
    let mut table = HomologyTable::new(max_degree, max_weight);
    fn rec(gens: &[FreeGenerator], d: usize, w: u32, max_d: usize, max_w: Option<u32>, t: &mut HomologyTable) {
        let Some((g, rest)) = gens.split_first() else {
            t.add(d, w, 1);
            return;
        };
        let top = if g.degree % 2 == 1 { 1 } else { usize::MAX };
        let mut e = 0;
        loop {
            let (de, we) = (d + e * g.degree, w + e as u32 * g.weight);
            if de > max_d || max_w.is_some_and(|m| we > m) {
                break;
            }
            rec(rest, de, we, max_d, max_w, t);
            e += 1;
            if e > top || g.degree == 0 {
                break;
            }
        }
    }
    rec(gens, 0, 0, max_degree, max_weight, &mut table);
    fill_zeros(&mut table);
    table
}

fn fill_zeros(t: &mut HomologyTable) {
    let top_w = t.max_weight.unwrap_or_else(|| t.weights().into_iter().max().unwrap_or(0));
    for d in 0..=t.max_degree {
        for w in 0..=top_w {
            t.add(d, w, 0);
        }
    }
}

fn sphere_generators(n: usize, m: Option<u32>) -> Vec<FreeGenerator> {
    let mut gens = vec![FreeGenerator { degree: n, weight: 1 }];
    if let Some(m) = m {
        gens.push(FreeGenerator {
            degree: n + 1,
            weight: m,
        });
    }
    gens
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn parse_name(name: &str) -> Result<(&str, BTreeMap<&str, usize>)> {
    let bad = || HarnessError::Unknown(name.to_string());
    let (base, params) = match name.split_once('(') {
        Some((b, rest)) => (b, rest.strip_suffix(')').ok_or_else(bad)?),
        None => (name, ""),
    };
    let mut map = BTreeMap::new();
    for part in params.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        map.insert(k.trim(), v.trim().parse().map_err(|_| bad())?);
    }
    Ok((base.trim(), map))
}

/// The expected table with the given name, through `max_degree` and `max_weight`.
pub fn expected_table(name: &str, max_degree: usize, max_weight: Option<u32>) -> Result<HomologyTable> {
    let (base, params) = parse_name(name)?;
    let n = params.get("n").copied().unwrap_or(1);
    let m = params.get("m").copied().unwrap_or(2) as u32;
    if n == 0 || m < 2 {
        return Err(HarnessError::Input(format!("{name}: need n >= 1 and m >= 2")));
    }
    let gens = match base {
        "HH1_Fp_poly" => vec![FreeGenerator { degree: 1, weight: 1 }],
        "HH2_Fp_poly" => {
            let mut t = HomologyTable::new(max_degree, max_weight);
            for d in (0..=max_degree).step_by(2) {
                let w = (d / 2) as u32;
                if max_weight.is_none_or(|mw| w <= mw) {
                    t.set(d, w, 1);
                }
            }
            fill_zeros(&mut t);
            return Ok(t);
        }
        "HHn_Q_poly" => sphere_generators(n, None),
        "HHn_Q_trunc" => sphere_generators(n, Some(m)),
        "bouquet_Q_trunc" => (1..=n)
            .flat_map(|k| std::iter::repeat_n(sphere_generators(k, Some(m)), binomial(n, k)).flatten())
            .collect(),
        _ => return Err(HarnessError::Unknown(name.to_string())),
    };
    Ok(free_table(&gens, max_degree, max_weight))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_tables() {
        assert_eq!(expected_table("HH1_Fp_poly", 3, None).unwrap().by_degree(), vec![1, 1, 0, 0]);
        let hh2 = expected_table("HH2_Fp_poly", 6, None).unwrap();
        assert_eq!(hh2.by_degree(), vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(hh2.get(4, 2), 1);
        assert_eq!(expected_table("HHn_Q_trunc", 4, None).unwrap().by_degree(), vec![1; 5]);
        assert_eq!(expected_table("HHn_Q_poly(n=2)", 4, None).unwrap().by_degree(), vec![1, 0, 1, 0, 1]);
        assert!(expected_table("HH9", 2, None).is_err());
        assert!(expected_table("HHn_Q_trunc(n=1", 2, None).is_err());
    }

    #[test]
    fn bouquet_count_at_degree_two() {
        let b = expected_table("bouquet_Q_trunc(n=2,m=2)", 3, None).unwrap();
        assert_eq!(b.by_degree(), vec![1, 2, 4, 7]);
    }

    #[test]
    fn weights_are_respected() {
        let t = expected_table("HHn_Q_trunc(n=1,m=3)", 4, Some(4)).unwrap();
        assert_eq!(t.get(2, 3), 1);
        assert_eq!(t.get(3, 4), 1);
        assert_eq!(t.get(4, 6), 0);
        assert_eq!(t.by_degree(), vec![1, 1, 1, 1, 0]);
    }

    #[test]
    fn binomials() {
        assert_eq!((0..=4).map(|k| binomial(4, k)).collect::<Vec<_>>(), vec![1, 4, 6, 4, 1]);
    }
}
