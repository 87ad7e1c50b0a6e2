//! Running scenarios: task dispatch, verdicts, reports and the result cache.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use loday_core::field::{ExactField, Field, PrimeField, Rationals};
use loday_core::homology::{compare_tables, HomologyTable};
use loday_core::loday::{Coefficients, FiberwiseLabels, LodayComplex, LodaySpec};
use loday_core::spectral::{collapse_check, e2_page};
use loday_core::torusdiag::{diagonal_minus_volume, quotient_poly_image, relation_check, split_move_witness};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::golden::expected_table;
use crate::scenario::{
    build_algebra, build_space, build_twist, parse_field, parse_scalars, BuiltSpace, CoefficientSpec, DiagonalSpec,
    Model, Scenario, Task,
};
use crate::stability::stability_compare;

pub const ENGINE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const CACHE_ENV: &str = "LODAY_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            check: check.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything a scenario run produces. Timings are not part of it, so equal
/// inputs give byte-identical documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub engine_version: String,
    pub cache_key: String,
    pub scenario: Scenario,
    /// Homology tables keyed by role, cells keyed by "d,w".
    pub tables: BTreeMap<String, HomologyTable>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub details: Value,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| HarnessError::Serialize(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| HarnessError::Serialize(e.to_string()))
}

/// Hash of the canonical scenario serialization, referenced files and engine version.
pub fn cache_key(s: &Scenario) -> Result<String> {
    let mut h = Sha256::new();
    h.update(ENGINE_VERSION.as_bytes());
    h.update([0]);
    h.update(serde_json::to_string(s).map_err(|e| HarnessError::Serialize(e.to_string()))?);
    for (name, bytes) in s.referenced_files()? {
        h.update([0]);
        h.update(name.as_bytes());
        h.update([0]);
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

struct Outcome {
    tables: BTreeMap<String, HomologyTable>,
    verdicts: Vec<Verdict>,
    details: Value,
}

fn table_verdicts(s: &Scenario, table: &HomologyTable, out: &mut Vec<Verdict>) -> Result<()> {
    let e = &s.expect;
    if let Some(name) = &e.golden {
        let expected = expected_table(name, table.max_degree, table.max_weight)?;
        let cmp = compare_tables(table, &expected, table.max_degree, table.max_weight);
        let detail = match cmp.first_divergence {
            None => format!("all {} cells agree", cmp.cells.len()),
            Some((d, w, got, want)) => format!("cell {d},{w}: computed {got}, expected {want}"),
        };
        out.push(Verdict::new(format!("golden {name}"), cmp.equal, detail));
    }
    if let Some(want) = &e.degrees {
        let got = table.by_degree();
        let ok = want.len() <= got.len() && got[..want.len()] == want[..];
        out.push(Verdict::new("degrees", ok, format!("computed {got:?}, expected {want:?}")));
    }
    for c in &e.cells {
        let got = table.get(c.degree, c.weight);
        out.push(Verdict::new(
            format!("cell {},{}", c.degree, c.weight),
            got == c.dim,
            format!("computed {got}, expected {}", c.dim),
        ));
    }
    Ok(())
}

fn coefficients<F: Field>(c: CoefficientSpec) -> Coefficients<F> {
    match c {
        CoefficientSpec::Augmentation => Coefficients::Augmentation,
        CoefficientSpec::Algebra => Coefficients::SameAsAlgebra,
    }
}

/// Builds the Loday spec of a (space, algebra) pair; twisted products in the
/// fiberwise model are computed separately and returned as a table.
fn loday_homology<F: Field>(
    field: &F,
    s: &Scenario,
    space: &crate::scenario::SpaceSpec,
    algebra: &crate::scenario::AlgebraSpec,
    coeff: CoefficientSpec,
    twist: Option<&crate::scenario::TwistSpec>,
    details: &mut BTreeMap<String, Value>,
) -> Result<HomologyTable> {
    let d = s.degree_budget;
    let built = build_algebra(field, algebra, s.weight_budget)?;
    let space = build_space(s, space, d + 1)?;
    let plain = match space {
        BuiltSpace::Twisted(tp, Model::Fiberwise) => {
            if coeff != CoefficientSpec::Algebra {
                return Err(HarnessError::Input("the fiberwise model needs coefficients = \"algebra\"".into()));
            }
            if twist.is_some() {
                return Err(HarnessError::Input("the fiberwise model takes no extra twist".into()));
            }
            let labels = FiberwiseLabels::new(Arc::new(tp.fiber.clone()), built.algebra, tp.action.clone(), d, s.weight_budget)?;
            let complex = LodayComplex::with_system(Arc::new(tp.base.clone()), labels, Some(tp.tau.clone()), d, s.weight_budget)?;
            details.insert("model".into(), json!("fiberwise"));
            details.insert("chain_dims".into(), chain_dims(&complex.block_dims()?));
            return Ok(complex.homology()?);
        }
        BuiltSpace::Twisted(tp, Model::Total) => tp.total,
        BuiltSpace::Plain(x) => x,
    };
    let mut spec = LodaySpec::new(Arc::new(plain), built.algebra.clone())
        .with_coefficients(coefficients(coeff))
        .with_degree_budget(d);
    if let Some(w) = s.weight_budget {
        spec = spec.with_weight_budget(w);
    }
    if let Some(t) = twist {
        let (tau, action) = build_twist(field, t, &spec.space, &built)?;
        spec = spec.with_twist(tau, action);
    }
    let complex = spec.build()?;
    details.insert("chain_dims".into(), chain_dims(&complex.block_dims()?));
    Ok(complex.homology()?)
}

fn chain_dims(blocks: &BTreeMap<(usize, u32, u32), usize>) -> Value {
    let mut m: BTreeMap<String, usize> = BTreeMap::new();
    for ((p, q, w), n) in blocks {
        *m.entry(format!("{},{}", p + *q as usize, w)).or_insert(0) += n;
    }
    json!(m)
}

fn homology_task<F: Field>(field: &F, s: &Scenario) -> Result<Outcome> {
    let mut details = BTreeMap::new();
    let table = loday_homology(
        field,
        s,
        s.space.as_ref().expect("checked"),
        s.algebra.as_ref().expect("checked"),
        s.coefficients,
        s.twist.as_ref(),
        &mut details,
    )?;
    let mut verdicts = Vec::new();
    table_verdicts(s, &table, &mut verdicts)?;
    Ok(Outcome {
        tables: BTreeMap::from([("homology".to_string(), table)]),
        verdicts,
        details: to_value(&details)?,
    })
}

fn stability_task<F: Field>(field: &F, s: &Scenario) -> Result<Outcome> {
    let built = build_algebra(field, s.algebra.as_ref().expect("checked"), s.weight_budget)?;
    let n = s.stability.as_ref().expect("checked").n;
    let r = stability_compare(&built.algebra, n, s.degree_budget, s.weight_budget)?;
    let mut verdicts = Vec::new();
    if let Some(c) = &r.torus_cross_check {
        verdicts.push(Verdict::new("torus cross-check", c.equal, "total complex against the diagonal construction"));
    }
    if let Some(c) = &r.kunneth_cross_check {
        verdicts.push(Verdict::new("bouquet cross-check", c.equal, "wedge against the Künneth product"));
    }
    let e = &s.expect;
    let divergence = match r.first_divergence_degree {
        None => format!("equal through degree {}", r.max_degree),
        Some(d) => {
            let (t, b) = r.comparison.degree_totals[d];
            format!("first divergence in degree {d}: torus {t}, bouquet {b}")
        }
    };
    if let Some(stable) = e.stable {
        verdicts.push(Verdict::new("stable", r.comparison.equal == stable, divergence.clone()));
    }
    if let Some(d) = e.divergence_degree {
        verdicts.push(Verdict::new("divergence degree", r.first_divergence_degree == Some(d), divergence.clone()));
    }
    if let Some(smaller) = e.torus_smaller {
        verdicts.push(Verdict::new("torus smaller", r.torus_smaller == Some(smaller), divergence));
    }
    let mut tables = BTreeMap::new();
    tables.insert("torus".to_string(), r.torus.clone());
    tables.insert("bouquet".to_string(), r.bouquet.clone());
    table_verdicts(s, &r.torus, &mut verdicts)?;
    Ok(Outcome {
        tables,
        verdicts,
        details: json!({
            "n": r.n,
            "bouquet_method": r.bouquet_method,
            "first_divergence_degree": r.first_divergence_degree,
            "torus_smaller": r.torus_smaller,
            "degree_totals": r.comparison.degree_totals,
            "cells": r.comparison.cells,
        }),
    })
}

fn e2_task<F: Field>(field: &F, s: &Scenario) -> Result<Outcome> {
    let d = s.degree_budget;
    let built = build_algebra(field, s.algebra.as_ref().expect("checked"), s.weight_budget)?;
    let base = match build_space(s, s.space.as_ref().expect("checked"), d + 1)? {
        BuiltSpace::Plain(x) => x,
        BuiltSpace::Twisted(..) => return Err(HarnessError::Input("the E² base must be a plain space".into())),
    };
    let mut spec = LodaySpec::new(Arc::new(base), built.algebra.clone())
        .with_coefficients(coefficients(s.coefficients))
        .with_degree_budget(d);
    if let Some(w) = s.weight_budget {
        spec = spec.with_weight_budget(w);
    }
    if let Some(t) = &s.twist {
        let (tau, action) = build_twist(field, t, &spec.space, &built)?;
        spec = spec.with_twist(tau, action);
    }
    let page = e2_page(&spec, &s.name)?;
    let mut verdicts = Vec::new();
    let mut tables = BTreeMap::new();
    let mut details = BTreeMap::new();
    if let Some(rows) = &s.expect.rows {
        let got = page.nonzero_rows();
        verdicts.push(Verdict::new("rows", &got == rows, format!("nonzero rows {got:?}, expected {rows:?}")));
    }
    if let Some(want) = &s.expect.degrees {
        let got: Vec<usize> = (0..=d).map(|n| page.total(n, None)).collect();
        let ok = want.len() <= got.len() && got[..want.len()] == want[..];
        verdicts.push(Verdict::new("degrees", ok, format!("E² totals {got:?}, expected {want:?}")));
    }
    if let Some(direct) = &s.e2_direct {
        let mut direct_details = BTreeMap::new();
        let table = loday_homology(field, s, &direct.space, &direct.algebra, direct.coefficients, None, &mut direct_details)?;
        let report = collapse_check(&page, &table, d);
        if let Some(want) = s.expect.collapse {
            verdicts.push(Verdict::new("collapse", report.holds == want, format!("totals agree: {}", report.holds)));
        }
        details.insert("collapse".to_string(), to_value(&report)?);
        details.insert("direct".to_string(), to_value(&direct_details)?);
        table_verdicts(s, &table, &mut verdicts)?;
        tables.insert("direct".to_string(), table);
    }
    details.insert("e2".to_string(), to_value(&page)?);
    Ok(Outcome {
        tables,
        verdicts,
        details: to_value(&details)?,
    })
}

fn diagonal_task(s: &Scenario) -> Result<Outcome> {
    let q = Rationals;
    let mut verdicts = Vec::new();
    let mut items = Vec::new();
    for spec in &s.diagonal {
        match spec {
            DiagonalSpec::Relations { n, k, mode } => {
                let v = relation_check(*n, *k, *mode)?;
                let certified = v.relations.iter().filter(|r| r.certified).count();
                verdicts.push(Verdict::new(
                    format!("{mode:?} relations n={n} k={k}"),
                    v.all_certified,
                    format!("{certified} of {} certified", v.relations.len()),
                ));
                items.push(json!({
                    "kind": "relations",
                    "n": n,
                    "k": k,
                    "mode": mode,
                    "relations": v.relations.iter().map(|r| json!({
                        "description": r.description,
                        "certified": r.certified,
                        "rewrite_matches": r.rewrite_matches,
                    })).collect::<Vec<_>>(),
                }));
            }
            DiagonalSpec::Witness { n, k, multiple, boundary } => {
                let r = diagonal_minus_volume(*n, *k, *multiple)?;
                let alg = loday_core::algebra::poly_weight_capped(q, (*k).max(*n) as u32);
                verdicts.push(Verdict::new(
                    r.description.clone(),
                    r.certified == *boundary,
                    format!("boundary: {}, expected {boundary}", r.certified),
                ));
                items.push(json!({
                    "kind": "witness",
                    "description": r.description,
                    "boundary": r.certified,
                    "witness": r.witness.as_ref().map(|w| w.records(&alg)),
                }));
            }
            DiagonalSpec::Quotient { n, coefficients } => {
                let v = quotient_poly_image(*n, &parse_scalars(&q, coefficients)?)?;
                verdicts.push(Verdict::new(
                    format!("quotient image n={n} q={coefficients:?}"),
                    v.holds,
                    format!("leading class nonzero: {}", v.leading_class_nonzero),
                ));
                items.push(json!({ "kind": "quotient", "verdict": v }));
            }
            DiagonalSpec::Split { x, a, y, b } => {
                let m = split_move_witness(*x, a, *y, b)?;
                let alg = loday_core::algebra::poly_weight_capped(q, (x + y) as u32);
                verdicts.push(Verdict::new(
                    format!("split move x=t^{x} a={a:?} y=t^{y} b={b:?}"),
                    m.holds,
                    format!("d(witness) = {} · three-term sum", m.sign),
                ));
                items.push(json!({
                    "kind": "split",
                    "witness": m.witness.records(&alg),
                    "boundary": m.boundary.records(&alg),
                    "sign": m.sign,
                }));
            }
        }
    }
    Ok(Outcome {
        tables: BTreeMap::new(),
        verdicts,
        details: json!({ "items": items }),
    })
}

fn compute<F: Field>(field: F, s: &Scenario) -> Result<Outcome> {
    match s.task {
        Task::Homology => homology_task(&field, s),
        Task::Stability => stability_task(&field, s),
        Task::E2 => e2_task(&field, s),
        Task::Diagonal => diagonal_task(s),
    }
}

/// Computes the report of a scenario without touching the cache.
pub fn compute_report(s: &Scenario) -> Result<Report> {
    s.check()?;
    let outcome = match parse_field(&s.field)? {
        ExactField::Rational => compute(Rationals, s)?,
        ExactField::Prime(p) => compute(PrimeField::new(p)?, s)?,
    };
    let passed = outcome.verdicts.iter().all(|v| v.passed);
    Ok(Report {
        engine_version: ENGINE_VERSION.to_string(),
        cache_key: cache_key(s)?,
        scenario: s.clone(),
        tables: outcome.tables,
        verdicts: outcome.verdicts,
        passed,
        details: outcome.details,
    })
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Where report files go; nothing is written when unset.
    pub out_dir: Option<PathBuf>,
    pub use_cache: bool,
    /// Overrides the environment variable and the default location.
    pub cache_dir: Option<PathBuf>,
}

pub struct RunOutcome {
    pub report: Report,
    pub cache_hit: bool,
    pub files: Vec<PathBuf>,
}

pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(".loday-cache"), PathBuf::from)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// A cached report, if its digest and key check out; anything else is a miss.
fn load_cached(dir: &Path, key: &str) -> Option<(Report, String)> {
    let text = std::fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    let stored = std::fs::read_to_string(dir.join(format!("{key}.sha256"))).ok()?;
    if stored.trim() != digest(&text) {
        return None;
    }
    let report: Report = serde_json::from_str(&text).ok()?;
    (report.cache_key == key).then_some((report, text))
}

fn store_cached(dir: &Path, key: &str, json: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write(&dir.join(format!("{key}.json")), json)?;
    write(&dir.join(format!("{key}.sha256")), &format!("{}\n", digest(json)))
}

/// Runs a scenario through the cache and writes `<name>.json` and one CSV per table.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunOutcome> {
    let key = cache_key(s)?;
    let cache_dir = opts.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let cached = if opts.use_cache { load_cached(&cache_dir, &key) } else { None };
    let cache_hit = cached.is_some();
    let (report, json) = match cached {
        Some((mut r, text)) => {
            // the cached echo lacks the base directory, which is not serialized
            r.scenario.base_dir = s.base_dir.clone();
            (r, text)
        }
        None => {
            let r = compute_report(s)?;
            let text = r.to_json()?;
            if opts.use_cache {
                store_cached(&cache_dir, &key, &text)?;
            }
            (r, text)
        }
    };
    let mut files = Vec::new();
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let path = dir.join(format!("{}.json", s.name));
        write(&path, &json)?;
        files.push(path);
        for (role, table) in &report.tables {
            let path = dir.join(format!("{}.{role}.csv", s.name));
            write(&path, &table.to_csv())?;
            files.push(path);
        }
        if let Some(e2) = report.details.get("e2") {
            let page: loday_core::spectral::E2Page =
                serde_json::from_value(e2.clone()).map_err(|e| HarnessError::Serialize(e.to_string()))?;
            let path = dir.join(format!("{}.e2.csv", s.name));
            write(&path, &page.to_csv())?;
            files.push(path);
        }
    }
    Ok(RunOutcome { report, cache_hit, files })
}
