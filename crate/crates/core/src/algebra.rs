//! Finite-dimensional (graded-)commutative algebras given by structure constants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::simplicial::{FiniteGroup, GroupElem};

/// Sparse vector over a field, sorted by index, no explicit zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("truncation exponent must be positive")]
    ZeroExponent,
    #[error("leading coefficient of the quotient polynomial is zero")]
    ZeroLeadingCoefficient,
    #[error("algebras are over different fields")]
    FieldMismatch,
    #[error("product {left} * {right} exceeds the weight or degree cap")]
    Overflow { left: String, right: String },
    #[error("generator {0} has degree and weight zero")]
    DegenerateGenerator(String),
    #[error("invalid algebra: {0}")]
    Invalid(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElem {
    pub name: String,
    pub degree: u32,
    pub weight: Option<u32>,
    /// Exponent vector when the basis element is a monomial in named generators.
    #[serde(skip)]
    pub exponents: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Product<E> {
    Value(SparseVec<E>),
    /// The product lies beyond the cap of a truncated presentation.
    Overflow,
}

#[derive(Debug, Clone)]
pub struct StructureConstantAlgebra<F: Field> {
    field: F,
    basis: Vec<BasisElem>,
    unit: usize,
    table: Vec<Product<F::Elem>>,
    augmentation: Vec<F::Elem>,
    graded_commutative: bool,
}

pub fn parity_sign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

fn scale<F: Field>(field: &F, v: &SparseVec<F::Elem>, c: &F::Elem) -> SparseVec<F::Elem> {
    v.iter()
        .map(|(i, x)| (*i, field.mul(x, c)))
        .filter(|(_, x)| !field.is_zero(x))
        .collect()
}

/// Adds `c * v` into `acc` (both sorted).
pub fn axpy<F: Field>(field: &F, acc: &mut SparseVec<F::Elem>, c: &F::Elem, v: &SparseVec<F::Elem>) {
    if field.is_zero(c) || v.is_empty() {
        return;
    }
    let mut out = Vec::with_capacity(acc.len() + v.len());
    let (mut a, mut b) = (0, 0);
    while a < acc.len() || b < v.len() {
        if b == v.len() || (a < acc.len() && acc[a].0 < v[b].0) {
            out.push(acc[a].clone());
            a += 1;
        } else if a == acc.len() || v[b].0 < acc[a].0 {
            let x = field.mul(c, &v[b].1);
            if !field.is_zero(&x) {
                out.push((v[b].0, x));
            }
            b += 1;
        } else {
            let mut x = acc[a].1.clone();
            field.add_mul_assign(&mut x, c, &v[b].1);
            if !field.is_zero(&x) {
                out.push((acc[a].0, x));
            }
            a += 1;
            b += 1;
        }
    }
    *acc = out;
}

impl<F: Field> StructureConstantAlgebra<F> {
    /// Assembles an algebra from raw data and validates it exhaustively.
    pub fn new(
        field: F,
        basis: Vec<BasisElem>,
        unit: usize,
        table: Vec<Product<F::Elem>>,
        augmentation: Vec<F::Elem>,
        graded_commutative: bool,
    ) -> Result<Self, AlgebraError> {
        let n = basis.len();
        if n == 0 || unit >= n || table.len() != n * n || augmentation.len() != n {
            return Err(AlgebraError::Invalid("table dimensions do not match the basis".into()));
        }
        let weighted = basis[0].weight.is_some();
        if basis.iter().any(|b| b.weight.is_some() != weighted) {
            return Err(AlgebraError::Invalid("either every basis element has a weight or none does".into()));
        }
        let alg = StructureConstantAlgebra {
            field,
            basis,
            unit,
            table,
            augmentation,
            graded_commutative,
        };
        let report = alg.validate();
        if let Some(first) = report.first() {
            return Err(AlgebraError::Invalid(first.clone()));
        }
        Ok(alg)
    }

    fn new_unchecked(
        field: F,
        basis: Vec<BasisElem>,
        table: Vec<Product<F::Elem>>,
        graded_commutative: bool,
    ) -> Self {
        let augmentation = (0..basis.len()).map(|i| if i == 0 { field.one() } else { field.zero() }).collect();
        StructureConstantAlgebra {
            field,
            basis,
            unit: 0,
            table,
            augmentation,
            graded_commutative,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.basis[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis[i].degree % 2 == 1
    }

    /// Weight of a basis element; zero when the algebra is unweighted.
    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight.unwrap_or(0)
    }

    pub fn is_weighted(&self) -> bool {
        self.basis[0].weight.is_some()
    }

    pub fn is_graded(&self) -> bool {
        self.basis.iter().any(|b| b.degree > 0)
    }

    pub fn graded_commutative(&self) -> bool {
        self.graded_commutative
    }

    pub fn augmentation(&self, i: usize) -> &F::Elem {
        &self.augmentation[i]
    }

    pub fn product(&self, i: usize, j: usize) -> &Product<F::Elem> {
        &self.table[i * self.dim() + j]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Result<&SparseVec<F::Elem>, AlgebraError> {
        match self.product(i, j) {
            Product::Value(v) => Ok(v),
            Product::Overflow => Err(AlgebraError::Overflow {
                left: self.name(i).to_string(),
                right: self.name(j).to_string(),
            }),
        }
    }

    pub fn mul(&self, a: &SparseVec<F::Elem>, b: &SparseVec<F::Elem>) -> Result<SparseVec<F::Elem>, AlgebraError> {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let c = self.field.mul(x, y);
                axpy(&self.field, &mut acc, &c, self.mul_basis(*i, *j)?);
            }
        }
        Ok(acc)
    }

    pub fn basis_vec(&self, i: usize) -> SparseVec<F::Elem> {
        vec![(i, self.field.one())]
    }

    pub fn format_vec(&self, v: &SparseVec<F::Elem>) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let terms: Vec<String> = v
            .iter()
            .map(|(i, c)| {
                if self.field.is_one(c) {
                    self.name(*i).to_string()
                } else {
                    format!("{}*{}", self.field.format(c), self.name(*i))
                }
            })
            .collect();
        terms.join(" + ")
    }

    /// Largest weight among basis elements.
    pub fn max_weight(&self) -> u32 {
        self.basis.iter().map(|b| b.weight.unwrap_or(0)).max().unwrap_or(0)
    }

    /// Every violated axiom, checked on all basis pairs and triples.
    pub fn validate(&self) -> Vec<String> {
        let f = &self.field;
        let n = self.dim();
        let mut out = Vec::new();
        for (idx, p) in self.table.iter().enumerate() {
            if let Product::Value(v) = p {
                if v.iter().any(|(k, c)| *k >= n || f.is_zero(c)) || v.windows(2).any(|w| w[0].0 >= w[1].0) {
                    out.push(format!("malformed product entry {} * {}", self.name(idx / n), self.name(idx % n)));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            let e = self.basis_vec(i);
            if self.mul_basis(self.unit, i).ok() != Some(&e) || self.mul_basis(i, self.unit).ok() != Some(&e) {
                out.push(format!("unit law fails on {}", self.name(i)));
            }
        }
        if self.basis[self.unit].degree != 0 || self.weight(self.unit) != 0 {
            out.push("unit must have degree and weight zero".into());
        }
        if !f.is_one(&self.augmentation[self.unit]) {
            out.push("augmentation of the unit is not 1".into());
        }
        for i in 0..n {
            if (self.degree(i) > 0 || self.weight(i) > 0) && !f.is_zero(&self.augmentation[i]) {
                out.push(format!("augmentation does not kill {}", self.name(i)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let Product::Value(ij) = self.product(i, j) else { continue };
                for (k, _) in ij {
                    if self.degree(*k) != self.degree(i) + self.degree(j) {
                        out.push(format!("{} * {} is not homogeneous in degree", self.name(i), self.name(j)));
                    }
                    if self.weight(*k) != self.weight(i) + self.weight(j) {
                        out.push(format!("{} * {} does not add weights", self.name(i), self.name(j)));
                    }
                }
                if self.graded_commutative {
                    if let Product::Value(ji) = self.product(j, i) {
                        let s = parity_sign(self.is_odd(i) && self.is_odd(j));
                        if *ij != scale(f, ji, &f.from_i64(s)) {
                            out.push(format!("{} and {} do not graded-commute", self.name(i), self.name(j)));
                        }
                    }
                }
                // augmentation is multiplicative
                let eps: F::Elem = ij.iter().fold(f.zero(), |mut acc, (k, c)| {
                    f.add_mul_assign(&mut acc, c, &self.augmentation[*k]);
                    acc
                });
                if eps != f.mul(&self.augmentation[i], &self.augmentation[j]) {
                    out.push(format!("augmentation not multiplicative on {} * {}", self.name(i), self.name(j)));
                }
                for k in 0..n {
                    let left = self.mul(ij, &self.basis_vec(k));
                    let right = self
                        .mul_basis(j, k)
                        .and_then(|jk| self.mul(&self.basis_vec(i), jk));
                    if let (Ok(l), Ok(r)) = (left, right) {
                        if l != r {
                            out.push(format!(
                                "associativity fails on ({}, {}, {})",
                                self.name(i),
                                self.name(j),
                                self.name(k)
                            ));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Serializable presentation with scalars written as text.
    pub fn to_presentation(&self) -> AlgebraPresentation {
        let n = self.dim();
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                match self.product(i, j) {
                    Product::Value(v) if v.is_empty() => {}
                    Product::Value(v) => products.push(ProductSpec {
                        left: i,
                        right: j,
                        terms: v.iter().map(|(k, c)| (*k, self.field.format(c))).collect(),
                        overflow: false,
                    }),
                    Product::Overflow => products.push(ProductSpec {
                        left: i,
                        right: j,
                        terms: Vec::new(),
                        overflow: true,
                    }),
                }
            }
        }
        AlgebraPresentation {
            basis: self.basis.clone(),
            unit: self.unit,
            products,
            augmentation: Some(self.augmentation.iter().map(|c| self.field.format(c)).collect()),
            graded_commutative: self.graded_commutative,
        }
    }

    pub fn from_presentation(field: F, p: &AlgebraPresentation) -> Result<Self, AlgebraError> {
        let n = p.basis.len();
        let mut table = vec![Product::Value(Vec::new()); n * n];
        for spec in &p.products {
            if spec.left >= n || spec.right >= n {
                return Err(AlgebraError::Invalid(format!("product ({}, {}) out of range", spec.left, spec.right)));
            }
            table[spec.left * n + spec.right] = if spec.overflow {
                Product::Overflow
            } else {
                let mut v = Vec::new();
                for (k, text) in &spec.terms {
                    axpy(&field, &mut v, &field.parse(text)?, &vec![(*k, field.one())]);
                }
                Product::Value(v)
            };
        }
        let augmentation = match &p.augmentation {
            Some(list) => list.iter().map(|t| field.parse(t)).collect::<Result<Vec<_>, _>>()?,
            None => (0..n).map(|i| if i == p.unit { field.one() } else { field.zero() }).collect(),
        };
        Self::new(field, p.basis.clone(), p.unit, table, augmentation, p.graded_commutative)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub left: usize,
    pub right: usize,
    #[serde(default)]
    pub terms: Vec<(usize, String)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub overflow: bool,
}

/// Text presentation of an algebra; pairs missing from `products` multiply to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraPresentation {
    pub basis: Vec<BasisElem>,
    #[serde(default)]
    pub unit: usize,
    pub products: Vec<ProductSpec>,
    #[serde(default)]
    pub augmentation: Option<Vec<String>>,
    #[serde(default = "default_true")]
    pub graded_commutative: bool,
}

fn default_true() -> bool {
    true
}

fn power_name(var: &str, i: u32) -> String {
    match i {
        0 => "1".into(),
        1 => var.into(),
        _ => format!("{var}^{i}"),
    }
}

fn basis_elem(name: String, degree: u32, weight: Option<u32>) -> BasisElem {
    BasisElem {
        name,
        degree,
        weight,
        exponents: None,
    }
}

/// The one-dimensional algebra `k`.
pub fn ground<F: Field>(field: F) -> StructureConstantAlgebra<F> {
    let one = field.one();
    StructureConstantAlgebra::new_unchecked(
        field,
        vec![basis_elem("1".into(), 0, Some(0))],
        vec![Product::Value(vec![(0, one)])],
        true,
    )
}

/// `k[t]/t^m` with `t` in weight 1.
pub fn truncated_poly<F: Field>(field: F, m: usize) -> Result<StructureConstantAlgebra<F>, AlgebraError> {
    if m == 0 {
        return Err(AlgebraError::ZeroExponent);
    }
    Ok(monomial_poly(field, m, false))
}

/// `k[t]` presented through weight `cap`; products beyond the cap overflow.
pub fn poly_weight_capped<F: Field>(field: F, cap: u32) -> StructureConstantAlgebra<F> {
    monomial_poly(field, cap as usize + 1, true)
}

fn monomial_poly<F: Field>(field: F, size: usize, overflow: bool) -> StructureConstantAlgebra<F> {
    let basis = (0..size as u32).map(|i| basis_elem(power_name("t", i), 0, Some(i))).collect();
    let mut table = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            table.push(if i + j < size {
                Product::Value(vec![(i + j, field.one())])
            } else if overflow {
                Product::Overflow
            } else {
                Product::Value(Vec::new())
            });
        }
    }
    StructureConstantAlgebra::new_unchecked(field, basis, table, true)
}

/// `k[t]/(q)` for `q = a_1 t + ... + a_m t^m`, given `coeffs = [a_1, ..., a_m]`.
/// Weighted only when `q` is a monomial.
pub fn quotient_by_poly<F: Field>(field: F, coeffs: &[F::Elem]) -> Result<StructureConstantAlgebra<F>, AlgebraError> {
    let m = coeffs.len();
    if m == 0 || field.is_zero(&coeffs[m - 1]) {
        return Err(AlgebraError::ZeroLeadingCoefficient);
    }
    let pure = coeffs[..m - 1].iter().all(|c| field.is_zero(c));
    if pure {
        return Ok(monomial_poly(field, m, false));
    }
    // powers[k] = t^k reduced, as a dense vector of length m
    let lead_inv = field.inv(&coeffs[m - 1]).expect("nonzero leading coefficient");
    let mut powers: Vec<Vec<F::Elem>> = Vec::new();
    for k in 0..=2 * (m - 1) {
        let mut v = vec![field.zero(); m];
        if k < m {
            v[k] = field.one();
        } else {
            // t^k = t * t^{k-1}, shifting and reducing t^m
            let prev = &powers[k - 1];
            let top = prev[m - 1].clone();
            for i in (1..m).rev() {
                v[i] = prev[i - 1].clone();
            }
            v[0] = field.zero();
            // t^m = -(a_1 t + ... + a_{m-1} t^{m-1}) / a_m ; note constant term is 0
            for i in 1..m {
                let c = field.neg(&field.mul(&coeffs[i - 1], &lead_inv));
                field.add_mul_assign(&mut v[i], &top, &c);
            }
        }
        powers.push(v);
    }
    let basis = (0..m as u32).map(|i| basis_elem(power_name("t", i), 0, None)).collect();
    let mut table = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let v = powers[i + j]
                .iter()
                .enumerate()
                .filter(|(_, c)| !field.is_zero(c))
                .map(|(k, c)| (k, c.clone()))
                .collect();
            table.push(Product::Value(v));
        }
    }
    Ok(StructureConstantAlgebra::new_unchecked(field, basis, table, true))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    #[serde(default)]
    pub weight: u32,
}

impl Generator {
    pub fn new(name: &str, degree: u32, weight: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
            weight,
        }
    }
}

/// Free graded-commutative algebra on the generators, keeping monomials of
/// degree at most `degree_cap` and weight at most `weight_cap`.
pub fn free_graded_commutative<F: Field>(
    field: F,
    gens: &[Generator],
    degree_cap: u32,
    weight_cap: u32,
) -> Result<StructureConstantAlgebra<F>, AlgebraError> {
    if let Some(g) = gens.iter().find(|g| g.degree == 0 && g.weight == 0) {
        return Err(AlgebraError::DegenerateGenerator(g.name.clone()));
    }
    let mut monomials: Vec<Vec<u32>> = vec![Vec::new()];
    for g in gens {
        let max_exp = if g.degree % 2 == 1 { 1 } else { u32::MAX };
        let mut next = Vec::new();
        for m in &monomials {
            let (d, w) = weigh(gens, m);
            let mut e = 0u32;
            loop {
                let dd = d + e * g.degree;
                let ww = w + e * g.weight;
                if e > max_exp || dd > degree_cap || ww > weight_cap {
                    break;
                }
                let mut m2 = m.clone();
                m2.push(e);
                next.push(m2);
                e += 1;
            }
        }
        monomials = next;
    }
    // stable order: by degree, then weight, then exponent vector
    monomials.sort_by_key(|m| {
        let (d, w) = weigh(gens, m);
        (d, w, m.clone())
    });
    let index: std::collections::HashMap<Vec<u32>, usize> =
        monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let basis = monomials
        .iter()
        .map(|m| {
            let (d, w) = weigh(gens, m);
            let parts: Vec<String> = m
                .iter()
                .zip(gens)
                .filter(|(e, _)| **e > 0)
                .map(|(e, g)| power_name(&g.name, *e))
                .collect();
            let name = if parts.is_empty() { "1".into() } else { parts.join("") };
            BasisElem {
                name,
                degree: d,
                weight: Some(w),
                exponents: Some(m.clone()),
            }
        })
        .collect();
    let n = monomials.len();
    let mut table = Vec::with_capacity(n * n);
    for a in &monomials {
        for b in &monomials {
            let mut prod = Vec::with_capacity(gens.len());
            let mut zero = false;
            for (k, g) in gens.iter().enumerate() {
                let e = a[k] + b[k];
                if g.degree % 2 == 1 && e > 1 {
                    zero = true;
                }
                prod.push(e);
            }
            if zero {
                table.push(Product::Value(Vec::new()));
                continue;
            }
            // moving each odd generator of b left past the odd generators of a with larger index
            let mut swaps = 0u32;
            for (i, gi) in gens.iter().enumerate() {
                if gi.degree % 2 == 0 || b[i] == 0 {
                    continue;
                }
                for (j, gj) in gens.iter().enumerate().skip(i + 1) {
                    if gj.degree % 2 == 1 {
                        swaps += a[j];
                    }
                }
            }
            table.push(match index.get(&prod) {
                Some(&k) => Product::Value(vec![(k, field.from_i64(parity_sign(swaps % 2 == 1)))]),
                None => Product::Overflow,
            });
        }
    }
    Ok(StructureConstantAlgebra::new_unchecked(field, basis, table, true))
}

fn weigh(gens: &[Generator], m: &[u32]) -> (u32, u32) {
    m.iter()
        .zip(gens)
        .fold((0, 0), |(d, w), (e, g)| (d + e * g.degree, w + e * g.weight))
}

/// `A ⊗ B` with `(a ⊗ b)(a' ⊗ b') = (-1)^{|b||a'|} aa' ⊗ bb'`; basis index `i * dim B + j`.
pub fn tensor<F: Field>(
    a: &StructureConstantAlgebra<F>,
    b: &StructureConstantAlgebra<F>,
) -> Result<StructureConstantAlgebra<F>, AlgebraError> {
    if a.field.kind() != b.field.kind() {
        return Err(AlgebraError::FieldMismatch);
    }
    let f = a.field.clone();
    let (na, nb) = (a.dim(), b.dim());
    let weighted = a.is_weighted() && b.is_weighted();
    let mut basis = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            basis.push(basis_elem(
                format!("{}⊗{}", a.name(i), b.name(j)),
                a.degree(i) + b.degree(j),
                weighted.then(|| a.weight(i) + b.weight(j)),
            ));
        }
    }
    let n = na * nb;
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        let (i, j) = (x / nb, x % nb);
        for y in 0..n {
            let (i2, j2) = (y / nb, y % nb);
            let entry = match (a.product(i, i2), b.product(j, j2)) {
                (Product::Value(u), Product::Value(v)) => {
                    let s = f.from_i64(parity_sign(b.is_odd(j) && a.is_odd(i2)));
                    let mut out = Vec::new();
                    for (k, c) in u {
                        for (l, d) in v {
                            let coeff = f.mul(&f.mul(c, d), &s);
                            out.push((k * nb + l, coeff));
                        }
                    }
                    out.sort_by_key(|t| t.0);
                    Product::Value(out)
                }
                _ => Product::Overflow,
            };
            table.push(entry);
        }
    }
    let augmentation = (0..n)
        .map(|x| f.mul(a.augmentation(x / nb), b.augmentation(x % nb)))
        .collect();
    Ok(StructureConstantAlgebra {
        field: f,
        basis,
        unit: a.unit * nb + b.unit,
        table,
        augmentation,
        graded_commutative: a.graded_commutative && b.graded_commutative,
    })
}

/// `A^{⊗n}` with the cyclic action
/// `γ(a_1 ⊗ ... ⊗ a_n) = ± a_n ⊗ a_1 ⊗ ... ⊗ a_{n-1}` (Koszul sign).
/// Basis digits are base `dim A`, `a_1` most significant.
pub fn tensor_power<F: Field>(
    a: &StructureConstantAlgebra<F>,
    n: usize,
) -> Result<(StructureConstantAlgebra<F>, GroupActionOnAlgebra<F>), AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::ZeroExponent);
    }
    let mut t = a.clone();
    for _ in 1..n {
        t = tensor(&t, a)?;
    }
    let d = a.dim();
    let f = &a.field;
    let images: Vec<SparseVec<F::Elem>> = (0..t.dim())
        .map(|x| {
            let mut digits = vec![0usize; n];
            let mut r = x;
            for k in (0..n).rev() {
                digits[k] = r % d;
                r /= d;
            }
            let last = digits[n - 1];
            let rest_odd = digits[..n - 1].iter().filter(|&&i| a.is_odd(i)).count() % 2 == 1;
            let sign = parity_sign(a.is_odd(last) && rest_odd);
            let rotated = std::iter::once(last).chain(digits[..n - 1].iter().copied());
            let idx = rotated.fold(0, |acc, i| acc * d + i);
            vec![(idx, f.from_i64(sign))]
        })
        .collect();
    let action = GroupActionOnAlgebra::from_generator(&t, FiniteGroup::cyclic(n), images)?;
    Ok((t, action))
}

/// A left action of a finite group by algebra automorphisms; `matrices[g][i]`
/// is the image of basis element `i`.
#[derive(Debug, Clone)]
pub struct GroupActionOnAlgebra<F: Field> {
    group: FiniteGroup,
    matrices: Vec<Vec<SparseVec<F::Elem>>>,
}

impl<F: Field> GroupActionOnAlgebra<F> {
    pub fn trivial(alg: &StructureConstantAlgebra<F>, group: FiniteGroup) -> Self {
        let id: Vec<_> = (0..alg.dim()).map(|i| alg.basis_vec(i)).collect();
        GroupActionOnAlgebra {
            matrices: vec![id; group.order()],
            group,
        }
    }

    /// Unchecked; see [`validate_action`].
    pub fn from_matrices(group: FiniteGroup, matrices: Vec<Vec<SparseVec<F::Elem>>>) -> Self {
        GroupActionOnAlgebra { group, matrices }
    }

    /// The action of a cyclic group determined by the generator's images.
    pub fn from_generator(
        alg: &StructureConstantAlgebra<F>,
        group: FiniteGroup,
        generator: Vec<SparseVec<F::Elem>>,
    ) -> Result<Self, AlgebraError> {
        let f = alg.field();
        if generator.len() != alg.dim() {
            return Err(AlgebraError::InvalidAction("generator image has wrong size".into()));
        }
        let gen = 1 % group.order();
        let mut matrices = vec![Vec::new(); group.order()];
        let mut current: Vec<SparseVec<F::Elem>> = (0..alg.dim()).map(|i| alg.basis_vec(i)).collect();
        let mut g = group.identity();
        for _ in 0..group.order() {
            matrices[g] = current.clone();
            current = current
                .iter()
                .map(|v| {
                    let mut out = Vec::new();
                    for (i, c) in v {
                        axpy(f, &mut out, c, &generator[*i]);
                    }
                    out
                })
                .collect();
            g = group.mul(gen, g);
        }
        let action = GroupActionOnAlgebra { group, matrices };
        let report = validate_action(alg, &action);
        match report.first() {
            Some(e) => Err(AlgebraError::InvalidAction(e.clone())),
            None => Ok(action),
        }
    }

    /// A cyclic group acting on a free graded-commutative algebra by scaling
    /// each generator by the given scalar.
    pub fn scaling_generators(
        alg: &StructureConstantAlgebra<F>,
        group: FiniteGroup,
        scalars: &[F::Elem],
    ) -> Result<Self, AlgebraError> {
        let f = alg.field();
        let images = alg
            .basis()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let exps = b
                    .exponents
                    .as_ref()
                    .ok_or_else(|| AlgebraError::InvalidAction("basis is not monomial".into()))?;
                let c = exps
                    .iter()
                    .zip(scalars)
                    .fold(f.one(), |acc, (e, s)| (0..*e).fold(acc, |a, _| f.mul(&a, s)));
                Ok(vec![(i, c)])
            })
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Self::from_generator(alg, group, images)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn image(&self, g: GroupElem, i: usize) -> &SparseVec<F::Elem> {
        &self.matrices[g][i]
    }

    pub fn is_trivial(&self, alg: &StructureConstantAlgebra<F>) -> bool {
        self.matrices
            .iter()
            .all(|m| m.iter().enumerate().all(|(i, v)| *v == alg.basis_vec(i)))
    }
}

/// Every way in which `action` fails to be an action by graded algebra
/// automorphisms; empty iff valid.
pub fn validate_action<F: Field>(alg: &StructureConstantAlgebra<F>, action: &GroupActionOnAlgebra<F>) -> Vec<String> {
    let f = alg.field();
    let n = alg.dim();
    let grp = &action.group;
    let mut out = Vec::new();
    if action.matrices.len() != grp.order() || action.matrices.iter().any(|m| m.len() != n) {
        return vec!["action matrices have the wrong shape".into()];
    }
    let apply = |g: GroupElem, v: &SparseVec<F::Elem>| {
        let mut r = Vec::new();
        for (i, c) in v {
            axpy(f, &mut r, c, &action.matrices[g][*i]);
        }
        r
    };
    for g in grp.elements() {
        for i in 0..n {
            for (k, _) in &action.matrices[g][i] {
                if *k >= n || alg.degree(*k) != alg.degree(i) || alg.weight(*k) != alg.weight(i) {
                    out.push(format!("element {g} does not preserve degree and weight of {}", alg.name(i)));
                }
            }
        }
        if action.matrices[g][alg.unit()] != alg.basis_vec(alg.unit()) {
            out.push(format!("element {g} does not fix the unit"));
        }
        for i in 0..n {
            for j in 0..n {
                let Ok(ij) = alg.mul_basis(i, j) else { continue };
                let lhs = apply(g, ij);
                if let Ok(rhs) = alg.mul(&action.matrices[g][i], &action.matrices[g][j]) {
                    if lhs != rhs {
                        out.push(format!("element {g} is not multiplicative on {} * {}", alg.name(i), alg.name(j)));
                    }
                }
            }
        }
        for h in grp.elements() {
            for i in 0..n {
                if apply(g, &action.matrices[h][i]) != action.matrices[grp.mul(g, h)][i] {
                    out.push(format!("group law fails for ({g}, {h})"));
                }
            }
        }
    }
    for i in 0..n {
        if action.matrices[grp.identity()][i] != alg.basis_vec(i) {
            out.push("identity acts nontrivially".into());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// An algebra map `A -> C` used to place coefficients at the basepoint.
#[derive(Debug, Clone)]
pub struct AlgebraMap<F: Field> {
    images: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> AlgebraMap<F> {
    pub fn new(
        source: &StructureConstantAlgebra<F>,
        target: &StructureConstantAlgebra<F>,
        images: Vec<SparseVec<F::Elem>>,
    ) -> Result<Self, AlgebraError> {
        let map = AlgebraMap { images };
        let f = source.field();
        if map.images.len() != source.dim() {
            return Err(AlgebraError::Invalid("structure map has wrong size".into()));
        }
        if map.images[source.unit()] != target.basis_vec(target.unit()) {
            return Err(AlgebraError::Invalid("structure map does not preserve the unit".into()));
        }
        for i in 0..source.dim() {
            for j in 0..source.dim() {
                let Ok(ij) = source.mul_basis(i, j) else { continue };
                let mut lhs = Vec::new();
                for (k, c) in ij {
                    axpy(f, &mut lhs, c, &map.images[*k]);
                }
                let rhs = target.mul(&map.images[i], &map.images[j])?;
                if lhs != rhs {
                    return Err(AlgebraError::Invalid(format!(
                        "structure map not multiplicative on {} * {}",
                        source.name(i),
                        source.name(j)
                    )));
                }
            }
        }
        Ok(map)
    }

    /// The augmentation `A -> k`.
    pub fn augmentation(source: &StructureConstantAlgebra<F>) -> Self {
        let f = source.field();
        AlgebraMap {
            images: (0..source.dim())
                .map(|i| {
                    let e = source.augmentation(i).clone();
                    if f.is_zero(&e) {
                        Vec::new()
                    } else {
                        vec![(0, e)]
                    }
                })
                .collect(),
        }
    }

    pub fn identity(source: &StructureConstantAlgebra<F>) -> Self {
        AlgebraMap {
            images: (0..source.dim()).map(|i| source.basis_vec(i)).collect(),
        }
    }

    pub fn image(&self, i: usize) -> &SparseVec<F::Elem> {
        &self.images[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn truncated_products() {
        let q = Rationals;
        let a = truncated_poly(q, 2).unwrap();
        assert!(a.mul_basis(1, 1).unwrap().is_empty());
        let f5 = PrimeField::new(5).unwrap();
        let b = truncated_poly(f5, 3).unwrap();
        assert_eq!(b.mul_basis(1, 1).unwrap(), &vec![(2, 1)]);
        assert!(b.mul_basis(1, 2).unwrap().is_empty());
        assert_eq!(*b.augmentation(0), 1);
        assert_eq!(*b.augmentation(1), 0);
        assert!(b.validate().is_empty());
        assert_eq!(truncated_poly(q, 0).unwrap_err(), AlgebraError::ZeroExponent);
    }

    #[test]
    fn capped_polynomial_overflows() {
        let a = poly_weight_capped(Rationals, 3);
        assert_eq!(a.mul_basis(1, 2).unwrap(), &vec![(3, Rationals.one())]);
        assert!(matches!(a.mul_basis(2, 2), Err(AlgebraError::Overflow { .. })));
        assert!(a.validate().is_empty());
    }

    #[test]
    fn quotient_reductions() {
        let q = Rationals;
        let a = quotient_by_poly(q, &[q.zero(), q.one()]).unwrap();
        let b = truncated_poly(q, 2).unwrap();
        assert_eq!(a.to_presentation(), b.to_presentation());
        // t^2 + t: t * t = -t
        let c = quotient_by_poly(q, &[q.one(), q.one()]).unwrap();
        assert_eq!(c.mul_basis(1, 1).unwrap(), &vec![(1, q.from_i64(-1))]);
        assert!(!c.is_weighted());
        // t^3 + 2t
        let d = quotient_by_poly(q, &[q.from_i64(2), q.zero(), q.one()]).unwrap();
        assert!(d.validate().is_empty());
        assert_eq!(d.mul_basis(2, 2).unwrap(), &vec![(2, q.from_i64(-2))]);
        assert_eq!(
            quotient_by_poly(q, &[q.one(), q.zero()]).unwrap_err(),
            AlgebraError::ZeroLeadingCoefficient
        );
    }

    #[test]
    fn exterior_rule() {
        let a = free_graded_commutative(
            f3(),
            &[Generator::new("x", 0, 1), Generator::new("ex", 1, 1)],
            4,
            3,
        )
        .unwrap();
        let x = a.find("x").unwrap();
        let ex = a.find("ex").unwrap();
        assert!(a.mul_basis(ex, ex).unwrap().is_empty());
        assert_eq!(a.mul_basis(x, ex).unwrap(), a.mul_basis(ex, x).unwrap());
        assert!(a.validate().is_empty());
    }

    #[test]
    fn polynomial_exterior_dims() {
        let q = Rationals;
        let a = free_graded_commutative(q, &[Generator::new("x", 2, 0), Generator::new("y", 3, 0)], 5, 0).unwrap();
        let dims: Vec<usize> = (0..=5).map(|d| a.basis().iter().filter(|b| b.degree == d).count()).collect();
        assert_eq!(dims, vec![1, 0, 1, 1, 1, 1]);
        let (x, y) = (a.find("x").unwrap(), a.find("y").unwrap());
        assert!(a.mul_basis(y, y).unwrap().is_empty());
        assert_eq!(a.mul_basis(x, y).unwrap(), a.mul_basis(y, x).unwrap());
        assert!(a.validate().is_empty());
    }

    #[test]
    fn odd_generators_anticommute() {
        let q = Rationals;
        let a = free_graded_commutative(q, &[Generator::new("a", 1, 0), Generator::new("b", 1, 0)], 2, 0).unwrap();
        let (x, y) = (a.find("a").unwrap(), a.find("b").unwrap());
        let ab = a.mul_basis(x, y).unwrap().clone();
        let ba = a.mul_basis(y, x).unwrap().clone();
        assert_eq!(ab[0].0, ba[0].0);
        assert_eq!(ab[0].1, q.neg(&ba[0].1));
        assert!(a.validate().is_empty());
    }

    #[test]
    fn tensor_square() {
        let a = truncated_poly(f3(), 2).unwrap();
        let t = tensor(&a, &a).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.unit(), 0);
        assert_eq!(t.name(0), "1⊗1");
        assert!(t.validate().is_empty());
        let (_, swap) = tensor_power(&a, 2).unwrap();
        assert!(validate_action(&t, &swap).is_empty());
    }

    #[test]
    fn graded_tensor_power_action() {
        let e = free_graded_commutative(f3(), &[Generator::new("e", 1, 1)], 1, 1).unwrap();
        let (t, rot) = tensor_power(&e, 3).unwrap();
        assert!(t.validate().is_empty());
        assert!(validate_action(&t, &rot).is_empty());
        let a = truncated_poly(f3(), 2).unwrap();
        let (t3, rot3) = tensor_power(&a, 3).unwrap();
        assert!(validate_action(&t3, &rot3).is_empty());
        // γ(t ⊗ 1 ⊗ 1) = 1 ⊗ t ⊗ 1
        assert_eq!(rot3.image(1, 4), &vec![(2, 1)]);
    }

    #[test]
    fn flip_action() {
        let f = f3();
        let a = free_graded_commutative(f, &[Generator::new("x", 0, 1), Generator::new("ex", 1, 1)], 1, 3).unwrap();
        let act = GroupActionOnAlgebra::scaling_generators(&a, FiniteGroup::cyclic(2), &[1, 2]).unwrap();
        assert!(validate_action(&a, &act).is_empty());
        let ex = a.find("ex").unwrap();
        assert_eq!(act.image(1, ex), &vec![(ex, 2)]);
    }

    #[test]
    fn bad_action_reported() {
        let a = truncated_poly(f3(), 3).unwrap();
        let mut images: Vec<SparseVec<u64>> = (0..3).map(|i| a.basis_vec(i)).collect();
        images[0] = vec![(1, 1)];
        let act = GroupActionOnAlgebra::from_matrices(FiniteGroup::cyclic(2), vec![(0..3).map(|i| a.basis_vec(i)).collect(), images]);
        assert!(!validate_action(&a, &act).is_empty());
    }

    #[test]
    fn presentation_round_trip() {
        let q = Rationals;
        let a = quotient_by_poly(q, &[q.from_i64(2), q.zero(), q.from_i64(3)]).unwrap();
        let p = a.to_presentation();
        let json = serde_json::to_string(&p).unwrap();
        let back: AlgebraPresentation = serde_json::from_str(&json).unwrap();
        let b = StructureConstantAlgebra::from_presentation(q, &back).unwrap();
        assert_eq!(b.to_presentation(), p);
    }

    #[test]
    fn invalid_presentation_rejected() {
        let mut p = truncated_poly(Rationals, 2).unwrap().to_presentation();
        p.augmentation = Some(vec!["1".into(), "1".into()]);
        assert!(StructureConstantAlgebra::from_presentation(Rationals, &p).is_err());
    }

    #[test]
    fn augmentation_map() {
        let a = truncated_poly(f3(), 3).unwrap();
        let k = ground(f3());
        let eps = AlgebraMap::augmentation(&a);
        assert!(AlgebraMap::new(&a, &k, (0..3).map(|i| eps.image(i).clone()).collect()).is_ok());
        assert!(AlgebraMap::new(&a, &k, vec![vec![(0, 1)]; 3]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn families_satisfy_axioms(m in 1usize..5, p in proptest::sample::select(vec![2u64, 3, 5, 7])) {
            let f = PrimeField::new(p).unwrap();
            proptest::prop_assert!(truncated_poly(f, m).unwrap().validate().is_empty());
            proptest::prop_assert!(poly_weight_capped(f, m as u32).validate().is_empty());
            let coeffs: Vec<u64> = (0..m).map(|i| (i as u64 * 7 + 1) % p).chain([1]).collect();
            proptest::prop_assert!(quotient_by_poly(f, &coeffs).unwrap().validate().is_empty());
        }

        #[test]
        fn free_algebra_weights_add(d1 in 0u32..3, d2 in 1u32..4) {
            let q = Rationals;
            let a = free_graded_commutative(q, &[Generator::new("u", d1, 1), Generator::new("v", d2, 1)], 6, 4).unwrap();
            proptest::prop_assert!(a.validate().is_empty());
        }

        #[test]
        fn scalar_round_trip(n in -50i64..50, d in 1i64..50) {
            let q = Rationals;
            let a = q.div(&q.from_i64(n), &q.from_i64(d)).unwrap();
            proptest::prop_assert_eq!(q.parse(&q.format(&a)).unwrap(), a);
        }
    }
}
