use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use loday_core::algebra::Generator;
use loday_core::field::{ExactField, PrimeField, Rationals};
use loday_core::simplicial::{validate, SimplicialSetDoc, TruncatedSimplicialSet};
use loday_core::torusdiag::RelationMode;
use loday_harness::scenario::{
    build_algebra, build_space, parse_field, AlgebraSpec, CoefficientSpec, DiagonalSpec, Expectation, Model, SpaceSpec,
    StabilitySpec, Task, TwistSpec, BUNDLED,
};
use loday_harness::{run_scenario, HarnessError, Result, RunOptions, Scenario};

/// Exact homology of Loday constructions over finite simplicial sets.
#[derive(Parser)]
#[command(name = "loday", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Ground field: Q or F<p>; overrides scenario files.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Degree budget D; overrides scenario files.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Weight budget W; overrides scenario files.
    #[arg(long, global = true)]
    weight: Option<u32>,
    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Recompute even when a cached report exists.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cache directory (default: $LODAY_CACHE_DIR or .loday-cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Homology of a Loday construction.
    Homology {
        #[command(flatten)]
        target: Target,
        /// Expected table to compare against, e.g. HHn_Q_trunc(n=1,m=2).
        #[arg(long)]
        golden: Option<String>,
    },
    /// Torus against its cell bouquet.
    Stability {
        /// Algebra, e.g. trunc:2.
        #[arg(long)]
        algebra: String,
        /// Torus dimension.
        #[arg(long)]
        n: usize,
        /// Assert equality (true) or divergence (false).
        #[arg(long)]
        expect_stable: Option<bool>,
    },
    /// E² page of a twisted construction over a base.
    E2 {
        #[command(flatten)]
        target: Target,
        /// Nonzero rows to assert, e.g. 0.
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
    },
    /// Certified relations between diagonal classes on tori over Q[t].
    Diagonal {
        #[command(subcommand)]
        what: DiagonalCommand,
    },
    /// Checks scenario files (.toml) or serialized simplicial sets (.json).
    Validate { files: Vec<PathBuf> },
    /// Lists the bundled scenarios.
    Scenarios,
    /// Runs bundled scenarios by name or scenario files by path.
    Run {
        scenarios: Vec<String>,
        /// Run every bundled scenario.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Args)]
struct Target {
    /// point, sphere:N, torus:N, bouquet:N, wedge:1,1,2, klein[:fiberwise], cover:N[:fiberwise], file:PATH
    #[arg(long)]
    space: String,
    /// ground, poly, trunc:M, quotient:a0,a1,..., exterior, free:NAME/DEG/WT,..., tensor:N:ALGEBRA
    #[arg(long)]
    algebra: String,
    /// augmentation or algebra
    #[arg(long, default_value = "augmentation")]
    coefficients: String,
    /// rotation or scaling:ORDER:s1,s2,...
    #[arg(long)]
    twist: Option<String>,
}

#[derive(Subcommand)]
enum DiagonalCommand {
    /// Is Δ_n(t^k) - multiple · vol_n a boundary?
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        multiple: i64,
    },
    /// Certify a family of relations: vanishing, pairwise or power.
    Relations {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        mode: String,
    },
    /// Image of q(t) = a_1 t + ... + a_m t^m in degree n.
    Quotient {
        #[arg(long)]
        n: usize,
        /// a_0,a_1,...,a_m with a_0 = 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coefficients: Vec<String>,
    },
    /// The split move for x_(a,1) · y_(b,1), exponents of t.
    Split {
        #[arg(long)]
        x: usize,
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        #[arg(long)]
        y: usize,
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
    },
}

fn input(msg: impl Into<String>) -> HarnessError {
    HarnessError::Input(msg.into())
}

fn parse_model(s: Option<&str>) -> Result<Model> {
    match s {
        None | Some("total") => Ok(Model::Total),
        Some("fiberwise") => Ok(Model::Fiberwise),
        Some(other) => Err(input(format!("unknown model {other:?}"))),
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| input(format!("expected a number, got {s:?}")))
}

fn parse_space(text: &str) -> Result<SpaceSpec> {
    let mut parts = text.splitn(2, ':');
    let head = parts.next().unwrap_or_default();
    let rest = parts.next();
    let arg = || rest.ok_or_else(|| input(format!("{head} needs a parameter")));
    Ok(match head {
        "point" => SpaceSpec::Point,
        "sphere" => SpaceSpec::Sphere { dim: parse_usize(arg()?)? },
        "torus" => SpaceSpec::Torus { n: parse_usize(arg()?)? },
        "bouquet" => SpaceSpec::TorusBouquet { n: parse_usize(arg()?)? },
        "wedge" => SpaceSpec::Wedge {
            spheres: arg()?.split(',').map(parse_usize).collect::<Result<_>>()?,
        },
        "klein" => SpaceSpec::KleinBottle { model: parse_model(rest)? },
        "cover" => {
            let mut p = arg()?.splitn(2, ':');
            SpaceSpec::CyclicCover {
                n: parse_usize(p.next().unwrap_or_default())?,
                model: parse_model(p.next())?,
            }
        }
        "file" => SpaceSpec::File { path: arg()?.into() },
        _ => return Err(input(format!("unknown space {text:?}"))),
    })
}

fn parse_algebra(text: &str, degree: usize, weight: Option<u32>) -> Result<AlgebraSpec> {
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    Ok(match head {
        "ground" => AlgebraSpec::Ground,
        "poly" => AlgebraSpec::Polynomial,
        "trunc" => AlgebraSpec::Truncated { m: parse_usize(rest)? },
        "quotient" => AlgebraSpec::Quotient {
            coefficients: rest.split(',').map(str::to_string).collect(),
        },
        "exterior" | "free" => {
            let spec = if head == "exterior" { "ex/1/1" } else { rest };
            let generators = spec
                .split(',')
                .map(|g| {
                    let f: Vec<&str> = g.split('/').collect();
                    if f.len() != 3 {
                        return Err(input(format!("generator {g:?} is not NAME/DEG/WT")));
                    }
                    Ok(Generator::new(f[0], parse_usize(f[1])? as u32, parse_usize(f[2])? as u32))
                })
                .collect::<Result<Vec<_>>>()?;
            let weight_cap = match weight {
                Some(w) => w,
                None => generators.iter().map(|g| g.weight).sum(),
            };
            AlgebraSpec::FreeGradedCommutative {
                generators,
                degree_cap: degree as u32 + 1,
                weight_cap,
            }
        }
        "tensor" => {
            let (n, base) = rest.split_once(':').ok_or_else(|| input("tensor:N:ALGEBRA"))?;
            AlgebraSpec::TensorPower {
                base: Box::new(parse_algebra(base, degree, weight)?),
                n: parse_usize(n)?,
            }
        }
        _ => return Err(input(format!("unknown algebra {text:?}"))),
    })
}

fn parse_twist(text: &str) -> Result<TwistSpec> {
    if text == "rotation" {
        return Ok(TwistSpec::Rotation);
    }
    let rest = text
        .strip_prefix("scaling:")
        .ok_or_else(|| input(format!("unknown twist {text:?}")))?;
    let (order, scalars) = rest.split_once(':').ok_or_else(|| input("scaling:ORDER:s1,s2,..."))?;
    Ok(TwistSpec::Scaling {
        order: parse_usize(order)?,
        scalars: scalars.split(',').map(str::to_string).collect(),
    })
}

fn parse_coefficients(text: &str) -> Result<CoefficientSpec> {
    match text {
        "augmentation" => Ok(CoefficientSpec::Augmentation),
        "algebra" => Ok(CoefficientSpec::Algebra),
        _ => Err(input(format!("unknown coefficients {text:?}"))),
    }
}

fn adhoc(name: &str, task: Task, g: &Global) -> Scenario {
    Scenario {
        name: name.to_string(),
        description: String::new(),
        task,
        field: g.field.clone().unwrap_or_else(|| "Q".into()),
        degree_budget: g.degree.unwrap_or(3),
        weight_budget: g.weight,
        space: None,
        algebra: None,
        coefficients: CoefficientSpec::Augmentation,
        twist: None,
        stability: None,
        e2_direct: None,
        diagonal: Vec::new(),
        expect: Expectation::default(),
        base_dir: std::env::current_dir().ok(),
    }
}

fn with_target(mut s: Scenario, t: &Target) -> Result<Scenario> {
    s.space = Some(parse_space(&t.space)?);
    s.algebra = Some(parse_algebra(&t.algebra, s.degree_budget, s.weight_budget)?);
    s.coefficients = parse_coefficients(&t.coefficients)?;
    s.twist = t.twist.as_deref().map(parse_twist).transpose()?;
    Ok(s)
}

fn scenarios_for(cli: &Cli) -> Result<Vec<Scenario>> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::Homology { target, golden } => {
            let mut s = with_target(adhoc("homology", Task::Homology, g), target)?;
            s.expect.golden = golden.clone();
            vec![s]
        }
        Command::Stability { algebra, n, expect_stable } => {
            let mut s = adhoc("stability", Task::Stability, g);
            s.degree_budget = g.degree.unwrap_or(*n);
            s.algebra = Some(parse_algebra(algebra, s.degree_budget, s.weight_budget)?);
            s.stability = Some(StabilitySpec { n: *n });
            s.expect.stable = *expect_stable;
            vec![s]
        }
        Command::E2 { target, rows } => {
            let mut s = with_target(adhoc("e2", Task::E2, g), target)?;
            s.expect.rows = rows.clone();
            vec![s]
        }
        Command::Diagonal { what } => {
            let mut s = adhoc("diagonal", Task::Diagonal, g);
            s.diagonal = vec![match what {
                DiagonalCommand::Witness { n, k, multiple } => DiagonalSpec::Witness {
                    n: *n,
                    k: *k,
                    multiple: *multiple,
                    boundary: true,
                },
                DiagonalCommand::Relations { n, k, mode } => DiagonalSpec::Relations {
                    n: *n,
                    k: *k,
                    mode: match mode.as_str() {
                        "vanishing" => RelationMode::Vanishing,
                        "pairwise" => RelationMode::Pairwise,
                        "power" => RelationMode::Power,
                        _ => return Err(input(format!("unknown mode {mode:?}"))),
                    },
                },
                DiagonalCommand::Quotient { n, coefficients } => DiagonalSpec::Quotient {
                    n: *n,
                    coefficients: coefficients.clone(),
                },
                DiagonalCommand::Split { x, a, y, b } => DiagonalSpec::Split {
                    x: *x,
                    a: a.clone(),
                    y: *y,
                    b: b.clone(),
                },
            }];
            vec![s]
        }
        Command::Run { scenarios, all } => {
            let names: Vec<String> = if *all {
                BUNDLED.iter().map(|(n, _)| n.to_string()).collect()
            } else {
                scenarios.clone()
            };
            if names.is_empty() {
                return Err(input("name at least one scenario, or pass --all"));
            }
            names
                .iter()
                .map(|n| {
                    let mut s = Scenario::load(n)?;
                    if let Some(f) = &g.field {
                        s.field = f.clone();
                    }
                    if let Some(d) = g.degree {
                        s.degree_budget = d;
                    }
                    if g.weight.is_some() {
                        s.weight_budget = g.weight;
                    }
                    Ok(s)
                })
                .collect::<Result<_>>()?
        }
        Command::Validate { .. } | Command::Scenarios => Vec::new(),
    })
}

fn validate_file(path: &Path) -> Result<String> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let doc: SimplicialSetDoc = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
            source_name: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let x = TruncatedSimplicialSet::try_from(doc)?;
        let violations = validate(&x);
        if let Some(v) = violations.first() {
            return Err(input(format!("{}: {} violations, first: {v:?}", path.display(), violations.len())));
        }
        return Ok(format!("simplicial set, level sizes {:?}", x.level_sizes()));
    }
    let s = Scenario::from_file(path)?;
    if let Some(space) = &s.space {
        build_space(&s, space, s.degree_budget + 1)?;
    }
    if let Some(alg) = &s.algebra {
        let violations = match parse_field(&s.field)? {
            ExactField::Rational => build_algebra(&Rationals, alg, s.weight_budget)?.algebra.validate(),
            ExactField::Prime(p) => build_algebra(&PrimeField::new(p)?, alg, s.weight_budget)?.algebra.validate(),
        };
        if let Some(v) = violations.first() {
            return Err(input(format!("{}: algebra fails {} axioms, first: {v}", path.display(), violations.len())));
        }
    }
    Ok(format!("scenario {:?} ({:?})", s.name, s.task))
}

fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Scenarios => {
            for (name, _) in BUNDLED {
                let s = Scenario::bundled(name)?;
                println!("{name:<24} {:<10} {}", format!("{:?}", s.task).to_lowercase(), s.description);
            }
            return Ok(true);
        }
        Command::Validate { files } => {
            if files.is_empty() {
                return Err(input("name at least one file"));
            }
            for f in files {
                println!("ok {}: {}", f.display(), validate_file(f)?);
            }
            return Ok(true);
        }
        _ => {}
    }
    let opts = RunOptions {
        out_dir: cli.global.out.clone(),
        use_cache: !cli.global.no_cache,
        cache_dir: cli.global.cache_dir.clone(),
    };
    let mut all_passed = true;
    for s in scenarios_for(cli)? {
        let start = Instant::now();
        let outcome = run_scenario(&s, &opts)?;
        let r = &outcome.report;
        all_passed &= r.passed;
        println!(
            "{} {}{}",
            if r.passed { "PASS" } else { "FAIL" },
            s.name,
            if outcome.cache_hit { " (cached)" } else { "" }
        );
        for (role, t) in &r.tables {
            println!("  {role}: {:?} by degree", t.by_degree());
        }
        for v in &r.verdicts {
            println!("  [{}] {}: {}", if v.passed { "ok" } else { "FAILED" }, v.check, v.detail);
        }
        for f in &outcome.files {
            println!("  wrote {}", f.display());
        }
        eprintln!("  {} took {:.2?}", s.name, start.elapsed());
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
