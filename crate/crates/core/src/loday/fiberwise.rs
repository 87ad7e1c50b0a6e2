//! Labels that are monomials of an unpointed Loday construction over a fiber,
//! acted on by a group through a simplicial action on the fiber.
//!
//! Twisted Loday over a base with these labels computes the Loday
//! construction of the twisted Cartesian product.

use std::sync::Arc;

use super::{multiply_grouped, Coefficients, ConstantLabels, LabelSystem, Lin, LodayComplex, LodayError, Monomial};
use crate::algebra::StructureConstantAlgebra;
use crate::field::Field;
use crate::simplicial::{FiniteGroup, GroupElem, SimplicialAction, TruncatedSimplicialSet};

pub struct FiberwiseLabels<F: Field> {
    fiber: LodayComplex<ConstantLabels<F>>,
    action: SimplicialAction,
    labels: Vec<Vec<Monomial<u32>>>,
}

impl<F: Field> FiberwiseLabels<F> {
    /// Labels in degree `p` are all non-unit monomials over `fiber_p` with
    /// internal degree at most `degree_budget + 1 - p` and weight within budget.
    /// The algebra action is trivial and all coefficients are unpointed.
    pub fn new(
        fiber: Arc<TruncatedSimplicialSet>,
        algebra: StructureConstantAlgebra<F>,
        action: SimplicialAction,
        degree_budget: usize,
        weight_budget: Option<u32>,
    ) -> Result<Self, LodayError> {
        action.validate(&fiber)?;
        let spec = super::LodaySpec {
            space: fiber,
            algebra,
            coefficients: Coefficients::SameAsAlgebra,
            twist: None,
            degree_budget,
            weight_budget,
        };
        let complex = spec.build()?.unnormalized();
        let mut labels = Vec::with_capacity(degree_budget + 2);
        for p in 0..=degree_budget + 1 {
            let mut weights: Vec<u32> = complex.strand_keys(p)?.into_iter().map(|(_, w)| w).collect();
            weights.sort_unstable();
            weights.dedup();
            let mut all = Vec::new();
            for w in weights {
                all.extend(complex.enumerate_basis(p, w)?.into_iter().filter(|m| !m.0.is_empty()));
            }
            all.sort();
            all.dedup();
            labels.push(all);
        }
        Ok(FiberwiseLabels {
            fiber: complex,
            action,
            labels,
        })
    }

    pub fn fiber(&self) -> &LodayComplex<ConstantLabels<F>> {
        &self.fiber
    }
}

impl<F: Field> ConstantLabels<F> {
    pub(crate) fn degree_of(&self, m: &Monomial<u32>) -> u32 {
        m.0.iter().map(|(_, l)| self.degree(l)).sum()
    }
}

fn to_lin<E>(terms: Vec<(Monomial<u32>, E)>) -> Lin<Monomial<u32>, E> {
    terms
        .into_iter()
        .map(|(m, c)| (if m.0.is_empty() { None } else { Some(m) }, c))
        .collect()
}

impl<F: Field> LabelSystem for FiberwiseLabels<F> {
    type F = F;
    type Label = Monomial<u32>;

    fn field(&self) -> &F {
        self.fiber.field()
    }

    fn labels(&self, p: usize) -> Vec<Monomial<u32>> {
        self.labels.get(p).cloned().unwrap_or_default()
    }

    fn base_labels(&self, p: usize) -> Vec<Monomial<u32>> {
        self.labels(p)
    }

    fn degree(&self, l: &Monomial<u32>) -> u32 {
        self.fiber.system().degree_of(l)
    }

    fn weight(&self, l: &Monomial<u32>) -> u32 {
        let sys = self.fiber.system();
        l.0.iter().map(|(_, a)| sys.weight(a)).sum()
    }

    fn product(&self, p: usize, factors: &[Monomial<u32>], _at_base: bool) -> Result<Lin<Monomial<u32>, F::Elem>, LodayError> {
        let entries = factors.iter().flat_map(|m| m.0.iter().cloned()).collect();
        let base = self.fiber.space().basepoint(p);
        let terms = multiply_grouped(self.fiber.system(), p, base, entries)?;
        Ok(to_lin(super::combine(self.field(), terms)))
    }

    fn face(&self, p: usize, i: usize, l: &Monomial<u32>) -> Result<Lin<Monomial<u32>, F::Elem>, LodayError> {
        Ok(to_lin(self.fiber.face_terms(p, l, i)?))
    }

    fn act(&self, g: GroupElem, p: usize, l: &Monomial<u32>) -> Lin<Monomial<u32>, F::Elem> {
        let sys = self.fiber.system();
        let f = self.field();
        let moved: Vec<(u32, bool)> = l.0.iter().map(|(x, a)| (self.action.act(g, p, *x), sys.is_odd(a))).collect();
        let sign = f.from_i64(super::koszul_sort_sign(&moved));
        let mut entries: Vec<(u32, u32)> = l.0.iter().map(|(x, a)| (self.action.act(g, p, *x), *a)).collect();
        entries.sort_by_key(|(x, _)| *x);
        vec![(Some(Monomial(entries)), sign)]
    }

    fn group(&self) -> Option<&FiniteGroup> {
        Some(self.action.group())
    }

    fn in_degeneracy_image(&self, p: usize, i: usize, l: &Monomial<u32>) -> bool {
        l.0.iter().all(|(x, _)| self.fiber.free_mask(p, *x) & (1 << i) == 0)
    }

    fn labels_escape_degeneracies(&self) -> bool {
        true
    }

    fn label_name(&self, l: &Monomial<u32>) -> String {
        format!("[{}]", self.format_label(l))
    }
}

impl<F: Field> FiberwiseLabels<F> {
    fn format_label(&self, l: &Monomial<u32>) -> String {
        let sys = self.fiber.system();
        let parts: Vec<String> = l.0.iter().map(|(x, a)| format!("{}@{}", sys.label_name(a), x)).collect();
        parts.join("⊗")
    }
}
