//! Labels drawn from a single algebra, constant over the simplicial set.

use std::sync::Arc;

use super::{LabelSystem, Lin, LodayComplex, LodayError};
use crate::algebra::{axpy, validate_action, AlgebraError, AlgebraMap, GroupActionOnAlgebra, Product, SparseVec, StructureConstantAlgebra};
use crate::field::Field;
use crate::simplicial::{FiniteGroup, GroupElem, TruncatedSimplicialSet, TwistingFunction};

/// What sits at the basepoint.
#[derive(Debug, Clone, Default)]
pub enum Coefficients<F: Field> {
    /// The ground field through the augmentation.
    #[default]
    Augmentation,
    /// The algebra itself; the unpointed construction.
    SameAsAlgebra,
    /// A commutative algebra `C` with a structure map `A -> C`.
    Algebra {
        algebra: StructureConstantAlgebra<F>,
        map: AlgebraMap<F>,
    },
}

#[derive(Debug, Clone)]
pub struct Twist<F: Field> {
    pub tau: TwistingFunction,
    pub action: GroupActionOnAlgebra<F>,
}

/// Everything needed to build a Loday complex with constant labels.
#[derive(Debug, Clone)]
pub struct LodaySpec<F: Field> {
    pub space: Arc<TruncatedSimplicialSet>,
    pub algebra: StructureConstantAlgebra<F>,
    pub coefficients: Coefficients<F>,
    pub twist: Option<Twist<F>>,
    pub degree_budget: usize,
    pub weight_budget: Option<u32>,
}

impl<F: Field> LodaySpec<F> {
    /// Untwisted, augmented coefficients, degree budget one below the truncation.
    pub fn new(space: Arc<TruncatedSimplicialSet>, algebra: StructureConstantAlgebra<F>) -> Self {
        let degree_budget = space.truncation().saturating_sub(1);
        LodaySpec {
            space,
            algebra,
            coefficients: Coefficients::Augmentation,
            twist: None,
            degree_budget,
            weight_budget: None,
        }
    }

    pub fn with_coefficients(mut self, c: Coefficients<F>) -> Self {
        self.coefficients = c;
        self
    }

    pub fn with_twist(mut self, tau: TwistingFunction, action: GroupActionOnAlgebra<F>) -> Self {
        self.twist = Some(Twist { tau, action });
        self
    }

    pub fn with_degree_budget(mut self, d: usize) -> Self {
        self.degree_budget = d;
        self
    }

    pub fn with_weight_budget(mut self, w: u32) -> Self {
        self.weight_budget = Some(w);
        self
    }

    pub fn build(&self) -> Result<LodayComplex<ConstantLabels<F>>, LodayError> {
        let alg = &self.algebra;
        let n = alg.dim();
        let overflows = (0..n).any(|i| (0..n).any(|j| matches!(alg.product(i, j), Product::Overflow)));
        if overflows && self.weight_budget.is_none() {
            return Err(LodayError::WeightBudgetRequired);
        }
        if let Some(t) = &self.twist {
            if let Some(e) = validate_action(alg, &t.action).first() {
                return Err(AlgebraError::InvalidAction(e.clone()).into());
            }
        }
        if let Coefficients::Algebra { algebra: c, map } = &self.coefficients {
            for i in 0..n {
                for (k, _) in map.image(i) {
                    if c.degree(*k) != alg.degree(i) || c.weight(*k) != alg.weight(i) {
                        return Err(AlgebraError::Invalid(format!("structure map does not preserve the grading of {}", alg.name(i))).into());
                    }
                }
            }
        }
        let system = ConstantLabels::new(alg.clone(), self.coefficients.clone(), self.twist.as_ref().map(|t| t.action.clone()));
        LodayComplex::with_system(
            self.space.clone(),
            system,
            self.twist.as_ref().map(|t| t.tau.clone()),
            self.degree_budget,
            self.weight_budget,
        )
    }
}

/// Labels are basis indices of `A`; with algebra coefficients, indices from
/// `dim A` on name basis elements of `C`.
pub struct ConstantLabels<F: Field> {
    algebra: StructureConstantAlgebra<F>,
    coefficients: Coefficients<F>,
    action: Option<GroupActionOnAlgebra<F>>,
}

impl<F: Field> ConstantLabels<F> {
    pub fn new(algebra: StructureConstantAlgebra<F>, coefficients: Coefficients<F>, action: Option<GroupActionOnAlgebra<F>>) -> Self {
        ConstantLabels {
            algebra,
            coefficients,
            action,
        }
    }

    pub fn algebra(&self) -> &StructureConstantAlgebra<F> {
        &self.algebra
    }

    pub fn coefficients(&self) -> &Coefficients<F> {
        &self.coefficients
    }

    fn offset(&self) -> u32 {
        self.algebra.dim() as u32
    }

    fn to_lin(alg: &StructureConstantAlgebra<F>, v: SparseVec<F::Elem>, offset: u32) -> Lin<u32, F::Elem> {
        v.into_iter()
            .map(|(i, c)| (if i == alg.unit() { None } else { Some(i as u32 + offset) }, c))
            .collect()
    }

    fn multiply(alg: &StructureConstantAlgebra<F>, factors: impl Iterator<Item = SparseVec<F::Elem>>) -> Result<SparseVec<F::Elem>, AlgebraError> {
        let f = alg.field();
        let mut acc = alg.basis_vec(alg.unit());
        for v in factors {
            acc = if v.len() == 1 && acc.len() == 1 {
                let c = f.mul(&acc[0].1, &v[0].1);
                let mut out = Vec::new();
                axpy(f, &mut out, &c, alg.mul_basis(acc[0].0, v[0].0)?);
                out
            } else {
                alg.mul(&acc, &v)?
            };
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }
}

impl<F: Field> LabelSystem for ConstantLabels<F> {
    type F = F;
    type Label = u32;

    fn field(&self) -> &F {
        self.algebra.field()
    }

    fn labels(&self, _p: usize) -> Vec<u32> {
        (0..self.algebra.dim() as u32).filter(|&i| i as usize != self.algebra.unit()).collect()
    }

    fn base_labels(&self, p: usize) -> Vec<u32> {
        match &self.coefficients {
            Coefficients::Augmentation => Vec::new(),
            Coefficients::SameAsAlgebra => self.labels(p),
            Coefficients::Algebra { algebra: c, .. } => (0..c.dim() as u32)
                .filter(|&i| i as usize != c.unit())
                .map(|i| i + self.offset())
                .collect(),
        }
    }

    fn degree(&self, l: &u32) -> u32 {
        match &self.coefficients {
            Coefficients::Algebra { algebra: c, .. } if *l >= self.offset() => c.degree((*l - self.offset()) as usize),
            _ => self.algebra.degree(*l as usize),
        }
    }

    fn weight(&self, l: &u32) -> u32 {
        match &self.coefficients {
            Coefficients::Algebra { algebra: c, .. } if *l >= self.offset() => c.weight((*l - self.offset()) as usize),
            _ => self.algebra.weight(*l as usize),
        }
    }

    fn product(&self, _p: usize, factors: &[u32], at_base: bool) -> Result<Lin<u32, F::Elem>, LodayError> {
        let alg = &self.algebra;
        let f = alg.field();
        if !at_base {
            let v = Self::multiply(alg, factors.iter().map(|&l| alg.basis_vec(l as usize)))?;
            return Ok(Self::to_lin(alg, v, 0));
        }
        match &self.coefficients {
            Coefficients::SameAsAlgebra => {
                let v = Self::multiply(alg, factors.iter().map(|&l| alg.basis_vec(l as usize)))?;
                Ok(Self::to_lin(alg, v, 0))
            }
            Coefficients::Augmentation => {
                let c = factors.iter().fold(f.one(), |acc, &l| f.mul(&acc, alg.augmentation(l as usize)));
                Ok(if f.is_zero(&c) { Vec::new() } else { vec![(None, c)] })
            }
            Coefficients::Algebra { algebra: c, map } => {
                let off = self.offset();
                let images = factors.iter().map(|&l| {
                    if l >= off {
                        c.basis_vec((l - off) as usize)
                    } else {
                        map.image(l as usize).clone()
                    }
                });
                let v = Self::multiply(c, images)?;
                Ok(Self::to_lin(c, v, off))
            }
        }
    }

    fn face(&self, _p: usize, _i: usize, l: &u32) -> Result<Lin<u32, F::Elem>, LodayError> {
        Ok(vec![(Some(*l), self.field().one())])
    }

    fn act(&self, g: GroupElem, _p: usize, l: &u32) -> Lin<u32, F::Elem> {
        match &self.action {
            Some(a) if *l < self.offset() => Self::to_lin(&self.algebra, a.image(g, *l as usize).clone(), 0),
            _ => vec![(Some(*l), self.field().one())],
        }
    }

    fn group(&self) -> Option<&FiniteGroup> {
        self.action.as_ref().map(|a| a.group())
    }

    fn label_name(&self, l: &u32) -> String {
        match &self.coefficients {
            Coefficients::Algebra { algebra: c, .. } if *l >= self.offset() => c.name((*l - self.offset()) as usize).to_string(),
            _ => self.algebra.name(*l as usize).to_string(),
        }
    }
}
