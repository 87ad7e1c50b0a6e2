//! Scenario files: a TOML description of one computation and its expected outcome.
//!
//! ```toml
//! name = "klein_f3"
//! task = "homology"            # homology | stability | e2 | diagonal
//! field = "F3"                 # Q or F<p>
//! degree_budget = 2
//! weight_budget = 2
//! coefficients = "algebra"     # augmentation (default) | algebra
//!
//! [space]
//! kind = "klein_bottle"
//!
//! [algebra]
//! family = "polynomial"
//!
//! [expect]
//! cells = [{ degree = 1, weight = 1, dim = 1 }]
//! ```
//!
//! See `scenarios/README.md` for every table and key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use loday_core::algebra::{
    free_graded_commutative, ground, poly_weight_capped, quotient_by_poly, tensor_power, truncated_poly, Generator,
    GroupActionOnAlgebra, StructureConstantAlgebra,
};
use loday_core::field::{ExactField, Field, PrimeField};
use loday_core::simplicial::{
    cyclic_cover, klein_bottle, point, sphere, torus, torus_cell_bouquet, validate, wedge_all, FiniteGroup,
    SimplicialSetDoc, TruncatedSimplicialSet, TwistingFunction,
};
use loday_core::torusdiag::RelationMode;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const MAX_DEGREE_BUDGET: usize = 12;
pub const MAX_WEIGHT_BUDGET: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Homology,
    Stability,
    E2,
    Diagonal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// The twisted product as one simplicial set.
    #[default]
    Total,
    /// The fiber's Loday construction twisted over the base.
    Fiberwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Point,
    Sphere {
        dim: usize,
    },
    Torus {
        n: usize,
    },
    TorusBouquet {
        n: usize,
    },
    Wedge {
        spheres: Vec<usize>,
    },
    KleinBottle {
        #[serde(default)]
        model: Model,
    },
    CyclicCover {
        n: usize,
        #[serde(default)]
        model: Model,
    },
    /// A serialized simplicial set (JSON), relative to the scenario file.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AlgebraSpec {
    Ground,
    /// `k[t]`, presented through the weight budget.
    Polynomial,
    Truncated {
        m: usize,
    },
    /// `k[t]/(q)`, coefficients of `q` from the constant term up.
    Quotient {
        coefficients: Vec<String>,
    },
    FreeGradedCommutative {
        generators: Vec<Generator>,
        degree_cap: u32,
        weight_cap: u32,
    },
    /// `base^{⊗n}`, with `C_n` rotating the factors.
    TensorPower {
        base: Box<AlgebraSpec>,
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSpec {
    #[default]
    Augmentation,
    Algebra,
}

/// A twist of the Loday construction over a space whose edges all map to the
/// generator of a cyclic group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwistSpec {
    /// Rotation of the factors of a tensor power.
    Rotation,
    /// `C_order`, the generator scaling each algebra generator.
    Scaling { order: usize, scalars: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySpec {
    pub n: usize,
}

/// The computation an E² page is compared against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSpec {
    pub space: SpaceSpec,
    pub algebra: AlgebraSpec,
    #[serde(default)]
    pub coefficients: CoefficientSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagonalSpec {
    Relations {
        n: usize,
        k: usize,
        mode: RelationMode,
    },
    /// `Δ_n(t^k) - multiple · vol_n`.
    Witness {
        n: usize,
        k: usize,
        #[serde(default)]
        multiple: i64,
        #[serde(default = "yes")]
        boundary: bool,
    },
    Quotient {
        n: usize,
        coefficients: Vec<String>,
    },
    Split {
        x: usize,
        a: Vec<usize>,
        y: usize,
        b: Vec<usize>,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedCell {
    pub degree: usize,
    pub weight: u32,
    pub dim: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// A bundled expected table, e.g. `HHn_Q_trunc(n=1,m=2)`.
    pub golden: Option<String>,
    /// Homology per degree, summed over weights, from degree 0.
    pub degrees: Option<Vec<usize>>,
    #[serde(default)]
    pub cells: Vec<ExpectedCell>,
    pub stable: Option<bool>,
    pub divergence_degree: Option<usize>,
    pub torus_smaller: Option<bool>,
    /// Internal degrees of the nonzero E² rows.
    pub rows: Option<Vec<usize>>,
    pub collapse: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub task: Task,
    pub field: String,
    pub degree_budget: usize,
    pub weight_budget: Option<u32>,
    pub space: Option<SpaceSpec>,
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub coefficients: CoefficientSpec,
    pub twist: Option<TwistSpec>,
    pub stability: Option<StabilitySpec>,
    pub e2_direct: Option<DirectSpec>,
    #[serde(default)]
    pub diagonal: Vec<DiagonalSpec>,
    #[serde(default)]
    pub expect: Expectation,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

pub const BUNDLED: &[(&str, &str)] = &[
    ("klein_f3", include_str!("../scenarios/klein_f3.toml")),
    ("klein_f3_e2", include_str!("../scenarios/klein_f3_e2.toml")),
    ("smalltrunc", include_str!("../scenarios/smalltrunc.toml")),
    ("stability_q_n2", include_str!("../scenarios/stability_q_n2.toml")),
    ("stability_f2_n2", include_str!("../scenarios/stability_f2_n2.toml")),
    ("stability_f3_n2", include_str!("../scenarios/stability_f3_n2.toml")),
    ("golden_hh1_fp_poly", include_str!("../scenarios/golden_hh1_fp_poly.toml")),
    ("golden_hh2_fp_poly", include_str!("../scenarios/golden_hh2_fp_poly.toml")),
    ("golden_circle_q_trunc", include_str!("../scenarios/golden_circle_q_trunc.toml")),
    ("golden_sphere_q_poly", include_str!("../scenarios/golden_sphere_q_poly.toml")),
    ("double_cover_f3", include_str!("../scenarios/double_cover_f3.toml")),
    ("exterior_sign_q", include_str!("../scenarios/exterior_sign_q.toml")),
    ("diagonal_witnesses", include_str!("../scenarios/diagonal_witnesses.toml")),
];

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

impl Scenario {
    pub fn parse(text: &str, source_name: &str) -> Result<Scenario> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            HarnessError::Parse {
                source_name: source_name.to_string(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut s = Scenario::parse(&text, &path.display().to_string())?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    pub fn bundled(name: &str) -> Result<Scenario> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| HarnessError::Unknown(name.to_string()))?;
        Scenario::parse(text, &format!("bundled:{name}"))
    }

    /// A bundled name or a path to a scenario file.
    pub fn load(name_or_path: &str) -> Result<Scenario> {
        if BUNDLED.iter().any(|(n, _)| *n == name_or_path) {
            Scenario::bundled(name_or_path)
        } else {
            Scenario::from_file(Path::new(name_or_path))
        }
    }

    /// Field-level checks that the schema alone cannot express.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Input(format!("{}: {m}", self.name)));
        parse_field(&self.field)?;
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return bad("name must be non-empty and use only letters, digits, '_' or '-'".into());
        }
        if self.degree_budget > MAX_DEGREE_BUDGET {
            return bad(format!("degree_budget above the limit {MAX_DEGREE_BUDGET}"));
        }
        if self.weight_budget.is_some_and(|w| w > MAX_WEIGHT_BUDGET) {
            return bad(format!("weight_budget above the limit {MAX_WEIGHT_BUDGET}"));
        }
        match self.task {
            Task::Homology | Task::E2 => {
                if self.space.is_none() || self.algebra.is_none() {
                    return bad("[space] and [algebra] are required".into());
                }
            }
            Task::Stability => {
                if self.algebra.is_none() || self.stability.is_none() {
                    return bad("[algebra] and [stability] are required".into());
                }
            }
            Task::Diagonal => {
                if self.diagonal.is_empty() {
                    return bad("at least one [[diagonal]] entry is required".into());
                }
                if parse_field(&self.field)? != ExactField::Rational {
                    return bad("diagonal relations are computed over Q".into());
                }
            }
        }
        if self.e2_direct.is_some() && self.task != Task::E2 {
            return bad("[e2_direct] only applies to the e2 task".into());
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    /// Contents of every file the scenario refers to, for the cache key.
    pub fn referenced_files(&self) -> Result<BTreeMap<String, Vec<u8>>> {
        let mut out = BTreeMap::new();
        let spaces = self.space.iter().chain(self.e2_direct.as_ref().map(|d| &d.space));
        for s in spaces {
            if let SpaceSpec::File { path } = s {
                let p = self.resolve(path);
                let bytes = std::fs::read(&p).map_err(|e| HarnessError::io(&p, e))?;
                out.insert(path.display().to_string(), bytes);
            }
        }
        Ok(out)
    }
}

/// `Q` or `F<p>`, case-insensitive.
pub fn parse_field(text: &str) -> Result<ExactField> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(ExactField::Rational);
    }
    let p = t
        .strip_prefix(['F', 'f'])
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(|| HarnessError::Input(format!("unknown field {text:?}; use Q or F<p>")))?;
    Ok(ExactField::Prime(PrimeField::new(p)?.modulus()))
}

/// A simplicial set together with the twisted-product data, when it has any.
pub enum BuiltSpace {
    Plain(TruncatedSimplicialSet),
    Twisted(Box<loday_core::simplicial::TwistedProduct>, Model),
}

pub fn build_space(scenario: &Scenario, spec: &SpaceSpec, truncation: usize) -> Result<BuiltSpace> {
    let plain = |x: TruncatedSimplicialSet| Ok(BuiltSpace::Plain(x));
    match spec {
        SpaceSpec::Point => plain(point(truncation)),
        SpaceSpec::Sphere { dim } => plain(sphere(*dim, truncation)?),
        SpaceSpec::Torus { n } => plain(torus(*n, truncation)?),
        SpaceSpec::TorusBouquet { n } => plain(torus_cell_bouquet(*n, truncation)?),
        SpaceSpec::Wedge { spheres } => {
            let parts: std::result::Result<Vec<_>, _> = spheres.iter().map(|&d| sphere(d, truncation)).collect();
            plain(wedge_all(&parts?)?)
        }
        SpaceSpec::KleinBottle { model } => Ok(BuiltSpace::Twisted(Box::new(klein_bottle(truncation)?), *model)),
        SpaceSpec::CyclicCover { n, model } => Ok(BuiltSpace::Twisted(Box::new(cyclic_cover(*n, truncation)?), *model)),
        SpaceSpec::File { path } => {
            let p = scenario.resolve(path);
            let text = std::fs::read_to_string(&p).map_err(|e| HarnessError::io(&p, e))?;
            let doc: SimplicialSetDoc = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
                source_name: p.display().to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let x = TruncatedSimplicialSet::try_from(doc)?;
            let violations = validate(&x);
            if let Some(v) = violations.first() {
                return Err(HarnessError::Input(format!(
                    "{}: {} simplicial identity violations, first: {v:?}",
                    p.display(),
                    violations.len()
                )));
            }
            if x.truncation() < truncation {
                return Err(HarnessError::Input(format!(
                    "{}: truncation {} is below the required {truncation}",
                    p.display(),
                    x.truncation()
                )));
            }
            plain(x.truncate(truncation)?)
        }
    }
}

pub struct BuiltAlgebra<F: Field> {
    pub algebra: StructureConstantAlgebra<F>,
    pub rotation: Option<GroupActionOnAlgebra<F>>,
}

pub fn parse_scalars<F: Field>(field: &F, texts: &[String]) -> Result<Vec<F::Elem>> {
    texts.iter().map(|t| Ok(field.parse(t)?)).collect()
}

pub fn build_algebra<F: Field>(field: &F, spec: &AlgebraSpec, weight_budget: Option<u32>) -> Result<BuiltAlgebra<F>> {
    let plain = |algebra| Ok(BuiltAlgebra { algebra, rotation: None });
    match spec {
        AlgebraSpec::Ground => plain(ground(field.clone())),
        AlgebraSpec::Polynomial => {
            let cap = weight_budget
                .ok_or_else(|| HarnessError::Input("the polynomial algebra needs a weight_budget".into()))?;
            plain(poly_weight_capped(field.clone(), cap))
        }
        AlgebraSpec::Truncated { m } => plain(truncated_poly(field.clone(), *m)?),
        AlgebraSpec::Quotient { coefficients } => plain(quotient_by_poly(field.clone(), &parse_scalars(field, coefficients)?)?),
        AlgebraSpec::FreeGradedCommutative {
            generators,
            degree_cap,
            weight_cap,
        } => plain(free_graded_commutative(field.clone(), generators, *degree_cap, *weight_cap)?),
        AlgebraSpec::TensorPower { base, n } => {
            let b = build_algebra(field, base, weight_budget)?;
            let (algebra, rotation) = tensor_power(&b.algebra, *n)?;
            Ok(BuiltAlgebra {
                algebra,
                rotation: Some(rotation),
            })
        }
    }
}

/// The twisting function sending every edge to the generator, with the group action.
pub fn build_twist<F: Field>(
    field: &F,
    spec: &TwistSpec,
    space: &TruncatedSimplicialSet,
    algebra: &BuiltAlgebra<F>,
) -> Result<(TwistingFunction, GroupActionOnAlgebra<F>)> {
    let action = match spec {
        TwistSpec::Rotation => algebra
            .rotation
            .clone()
            .ok_or_else(|| HarnessError::Input("a rotation twist needs a tensor_power algebra".into()))?,
        TwistSpec::Scaling { order, scalars } => GroupActionOnAlgebra::scaling_generators(
            &algebra.algebra,
            FiniteGroup::cyclic(*order),
            &parse_scalars(field, scalars)?,
        )?,
    };
    let group = action.group().clone();
    let generator = 1 % group.order();
    let tau = TwistingFunction::from_edges(space, group, |_| generator)?;
    Ok((tau, action))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        for (name, _) in BUNDLED {
            let s = Scenario::bundled(name).unwrap();
            assert_eq!(&s.name, name);
        }
    }

    #[test]
    fn fields() {
        assert_eq!(parse_field("Q").unwrap(), ExactField::Rational);
        assert_eq!(parse_field("f7").unwrap(), ExactField::Prime(7));
        assert!(parse_field("F4").is_err());
        assert!(parse_field("R").is_err());
    }

    #[test]
    fn parse_errors_point_at_the_field() {
        let text = "name = \"x\"\ntask = \"homology\"\nfield = \"Q\"\ndegree_budget = \"two\"\n";
        match Scenario::parse(text, "x.toml").unwrap_err() {
            HarnessError::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("usize"), "{message}");
            }
            e => panic!("{e}"),
        }
        let unknown = "name = \"x\"\ntask = \"homology\"\nfield = \"Q\"\ndegree_budget = 2\ncolour = 1\n";
        assert!(matches!(Scenario::parse(unknown, "x.toml"), Err(HarnessError::Parse { line: 5, .. })));
    }

    #[test]
    fn missing_sections_are_input_errors() {
        let text = "name = \"x\"\ntask = \"homology\"\nfield = \"Q\"\ndegree_budget = 2\n";
        assert!(matches!(Scenario::parse(text, "x.toml"), Err(HarnessError::Input(_))));
        let text = "name = \"x\"\ntask = \"homology\"\nfield = \"Q\"\ndegree_budget = 40\n[space]\nkind = \"point\"\n[algebra]\nfamily = \"ground\"\n";
        assert!(matches!(Scenario::parse(text, "x.toml"), Err(HarnessError::Input(_))));
    }
}
