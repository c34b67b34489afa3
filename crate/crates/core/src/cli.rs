//! Command-line front end. Exit codes: 0 success, 1 a checked inequality
//! failed, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{fkg_check, reports_to_csv, BoundReport, LatticeFunctions, SweepConfig, SweepMode, TheoremId, Verifier};
use crate::closure::{multiplicity_closure_with, ClosureResult};
use crate::error::Error;
use crate::field::{FieldSpec, FiniteField};
use crate::generators::{curve_instance, nikodym_instance, partial_lines_instance, product_set, CurveSpec, InstanceBundle};
use crate::ideal::{hilbert_profile_with, Limits, PointSet};
use crate::monomial::{Exponent, Staircase};

const THEOREM_HELP: &str = "\
Theorem ids and the instance fields each one reads:
  size-bound              points, d
  closure-bound           points, d
  product-closure-bound   points, factors, d
  mult-set-bound          points, d, m
  mult-closure-bound      points, d, l, m
  hilbert-growth          points, m1, m2, [multiplicity]
  schwartz-zippel-mult    points, curve, d, l, m
  statistical-kakeya      bundle, [lambda], [tau], [d, l, m for the finite-l chain]
  partial-lines           bundle, [alpha as \"num/den\"]
  splus-growth            set, n, d
  union-subadditivity     parts, d
  closure-axioms          x, y, d
Point sets need the field as \"field\": {\"p\":3,\"e\":1} or \"q\": 3, and \"n\".";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "polyclosure", version, about = "Exact vanishing-ideal, closure and bound computations over finite fields")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest grid q^n that may be enumerated.
    #[arg(long, global = true, default_value_t = Limits::default().max_grid)]
    pub cap_grid: u64,
    /// Largest number of matrix entries that may be allocated.
    #[arg(long, global = true, default_value_t = Limits::default().max_matrix_entries)]
    pub cap_matrix: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// A point set given inline or by file.
#[derive(Debug, Args)]
pub struct PointsArg {
    /// Field order.
    #[arg(long, requires = "n", conflicts_with = "input")]
    pub q: Option<u64>,
    /// Ambient dimension.
    #[arg(long, requires = "q")]
    pub n: Option<usize>,
    /// Inline JSON list of points, e.g. [[0,0],[1,1]].
    #[arg(long, requires = "q", conflicts_with = "input")]
    pub points: Option<String>,
    /// Point set JSON file: {"field":{"p":3},"n":2,"points":[...]}.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hilbert function profile HF^m(Y, d) for d = 0..=dmax.
    Hilbert {
        #[command(flatten)]
        set: PointsArg,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        dmax: u32,
    },
    /// Degree-d closure of a point set.
    Closure {
        #[command(flatten)]
        set: PointsArg,
        #[arg(long)]
        d: u32,
    },
    /// Multiplicity closure: points where every degree-d polynomial vanishing
    /// to order m on Y vanishes to order l.
    Mclosure {
        #[command(flatten)]
        set: PointsArg,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: u32,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check one inequality on an instance file.
    #[command(after_help = THEOREM_HELP)]
    Verify {
        /// One of the theorem ids listed below.
        #[arg(value_parser = parse_theorem)]
        theorem: TheoremId,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Check a bound over every subset (q^n <= 16) or a seeded sample.
    Sweep {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        d_min: u32,
        #[arg(long)]
        d_max: u32,
        #[arg(long, value_parser = parse_mode, default_value = "closure-bound")]
        mode: SweepMode,
        /// Number of random subsets; omit for exhaustive enumeration.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Check the FKG hypotheses and inequality on tabulated functions.
    FkgCheck {
        /// JSON: {"box":[b1,..],"mu":[..],"f":[..],"g":[..]}, values as integers or "p/q".
        #[arg(long)]
        functions: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random distinct lines, each sampled in exactly tau points.
    Lines {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        tau: usize,
    },
    /// A random line through every grid point, each sampled in tau points.
    Nikodym {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tau: usize,
    },
    /// Cartesian product of subsets of F_q.
    Product {
        #[arg(long)]
        q: u64,
        /// JSON list of factors, e.g. [[0,1],[0,2]].
        #[arg(long)]
        sets: String,
    },
    /// Image of a parametric curve with a tau-point sample.
    Curve {
        #[arg(long)]
        q: u64,
        /// JSON list of component coefficient lists, constant term first.
        #[arg(long)]
        components: String,
        #[arg(long)]
        lambda: u32,
        #[arg(long)]
        tau: usize,
    },
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<SweepMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
pub enum CliError {
    Json { context: String, source: serde_json::Error },
    Io { path: PathBuf, source: std::io::Error },
    Lib(Error),
    Unsupported(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Json { context, source } => write!(f, "malformed JSON in {context}: {source}"),
            CliError::Io { path, source } => write!(f, "cannot access {}: {source}", path.display()),
            CliError::Lib(e @ (Error::GridTooLarge { .. } | Error::MatrixTooLarge { .. })) => write!(f, "cap exceeded: {e}"),
            CliError::Lib(e @ (Error::HypothesisNotMet(_) | Error::TauTooLarge { .. } | Error::NotInProduct)) => {
                write!(f, "hypothesis violated: {e}")
            }
            CliError::Lib(e) => write!(f, "invalid input: {e}"),
            CliError::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Rendered output and whether every checked inequality held.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub ok: bool,
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, context: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|source| CliError::Json { context: context.into(), source })
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn field_from(q: Option<u64>, spec: Option<FieldSpec>) -> CliResult<FiniteField> {
    match (spec, q) {
        (Some(spec), _) => Ok(FiniteField::from_spec(&spec)?),
        (None, Some(q)) => Ok(FiniteField::with_order(q)?),
        (None, None) => Err(Error::InvalidArgument("a field is required: give \"field\" or \"q\"".into()).into()),
    }
}

impl PointsArg {
    fn load(&self) -> CliResult<PointSet> {
        if let Some(path) = &self.input {
            return parse_json(&read_file(path)?, &path.display().to_string());
        }
        let (Some(q), Some(n)) = (self.q, self.n) else {
            return Err(Error::InvalidArgument("give --input, or --q and --n with --points".into()).into());
        };
        let points: Vec<Vec<u32>> = match &self.points {
            Some(text) => parse_json(text, "--points")?,
            None => Vec::new(),
        };
        Ok(PointSet::from_coords(&field_from(Some(q), None)?, n, &points)?)
    }
}

fn closure_csv(r: &ClosureResult) -> String {
    let mut out = (1..=r.output.dim()).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in r.output.iter() {
        out.push_str(&p.coords().iter().map(u32::to_string).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn emit_reports(reports: &[BoundReport], format: Format) -> CliResult<Output> {
    let ok = reports.iter().all(BoundReport::passed);
    let text = match format {
        Format::Csv => reports_to_csv(reports)?,
        Format::Json if reports.len() == 1 => json_text(&reports[0]),
        Format::Json => json_text(&reports),
    };
    Ok(Output { text, ok })
}

/// Instance file for `verify`; each theorem reads the fields it needs.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub field: Option<FieldSpec>,
    pub q: Option<u64>,
    pub n: Option<usize>,
    pub points: Option<Vec<Vec<u32>>>,
    pub d: Option<u32>,
    pub l: Option<u32>,
    pub m: Option<u32>,
    pub m1: Option<u32>,
    pub m2: Option<u32>,
    pub multiplicity: Option<u32>,
    pub factors: Option<Vec<Vec<u32>>>,
    pub curve: Option<CurveSpec>,
    pub bundle: Option<InstanceBundle>,
    pub lambda: Option<u32>,
    pub tau: Option<usize>,
    pub alpha: Option<String>,
    pub set: Option<Vec<Vec<u32>>>,
    pub parts: Option<Vec<Vec<Vec<u32>>>>,
    pub x: Option<Vec<Vec<u32>>>,
    pub y: Option<Vec<Vec<u32>>>,
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| Error::InvalidArgument(format!("instance is missing field '{name}'")).into())
}

impl Instance {
    fn field(&self) -> CliResult<FiniteField> {
        field_from(self.q, self.field.clone())
    }

    fn set(&self, coords: &Option<Vec<Vec<u32>>>, name: &str) -> CliResult<PointSet> {
        let n = need(&self.n, "n")?;
        Ok(PointSet::from_coords(&self.field()?, n, &need(coords, name)?)?)
    }

    fn points(&self) -> CliResult<PointSet> {
        self.set(&self.points, "points")
    }
}

/// Reads a `verify` instance; a bare generator bundle is accepted too.
fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read_file(path)?;
    let context = path.display().to_string();
    let value: serde_json::Value = parse_json(&text, &context)?;
    if value.get("samples").is_some() && value.get("curves").is_some() {
        let bundle: InstanceBundle = parse_json(&text, &context)?;
        return Ok(Instance { bundle: Some(bundle), ..Instance::default() });
    }
    parse_json(&text, &context)
}

fn verify(v: &Verifier, theorem: TheoremId, inst: &Instance) -> CliResult<Vec<BoundReport>> {
    let d = || need(&inst.d, "d");
    let one = |r: crate::error::Result<BoundReport>| -> CliResult<Vec<BoundReport>> { Ok(vec![r?]) };
    match theorem {
        TheoremId::SizeBound => one(v.size_bound(&inst.points()?, d()?)),
        TheoremId::ClosureBound => one(v.closure_bound(&inst.points()?, d()?)),
        TheoremId::ProductClosureBound => one(v.product_closure_bound(&need(&inst.factors, "factors")?, &inst.points()?, d()?)),
        TheoremId::MultSetBound => one(v.mult_set_bound(&inst.points()?, d()?, need(&inst.m, "m")?)),
        TheoremId::MultClosureBound => one(v.mult_closure_bound(&inst.points()?, d()?, need(&inst.l, "l")?, need(&inst.m, "m")?)),
        TheoremId::HilbertGrowth => one(v.hilbert_growth(&inst.points()?, need(&inst.m1, "m1")?, need(&inst.m2, "m2")?, inst.multiplicity.unwrap_or(1))),
        TheoremId::SchwartzZippelMult => {
            one(v.schwartz_zippel_mult(&inst.points()?, &need(&inst.curve, "curve")?, d()?, need(&inst.l, "l")?, need(&inst.m, "m")?))
        }
        TheoremId::StatisticalKakeya => {
            let bundle = need(&inst.bundle, "bundle")?;
            let lambda = inst.lambda.unwrap_or(1);
            let tau = inst.tau.unwrap_or(bundle.tau);
            let mut out = vec![v.statistical_kakeya(&bundle, lambda, tau)?];
            if let (Some(d), Some(l), Some(m)) = (inst.d, inst.l, inst.m) {
                out.push(v.kakeya_chain(&bundle, lambda, tau, d, l, m)?);
            }
            Ok(out)
        }
        TheoremId::PartialLines => {
            let bundle = need(&inst.bundle, "bundle")?;
            let mut out = v.partial_lines(&bundle)?;
            if let Some(alpha) = &inst.alpha {
                let parsed = alpha.split_once('/').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
                let (num, den) = parsed.ok_or_else(|| Error::InvalidArgument(format!("alpha must look like \"1/2\", got '{alpha}'")))?;
                out.push(v.partial_lines_alpha(&bundle, num, den)?);
            }
            Ok(out)
        }
        TheoremId::SplusGrowth => {
            let n = need(&inst.n, "n")?;
            let set = Staircase::new(n, need(&inst.set, "set")?.into_iter().map(Exponent::new))?;
            Ok(vec![v.splus_growth(&set, d()?)])
        }
        TheoremId::UnionSubadditivity => {
            let (f, n) = (inst.field()?, need(&inst.n, "n")?);
            let parts = need(&inst.parts, "parts")?
                .iter()
                .map(|p| PointSet::from_coords(&f, n, p))
                .collect::<crate::error::Result<Vec<_>>>()?;
            one(v.union_subadditivity(&parts, d()?))
        }
        TheoremId::ClosureAxioms => one(v.closure_axioms(&inst.set(&inst.x, "x")?, &inst.set(&inst.y, "y")?, d()?)),
    }
}

/// Runs a parsed command and renders its output.
pub fn execute(cli: &Cli) -> CliResult<Output> {
    let limits = Limits { max_grid: cli.cap_grid, max_matrix_entries: cli.cap_matrix };
    let verifier = Verifier::new(limits);
    let ok = |text: String| Ok(Output { text, ok: true });
    match &cli.command {
        Command::Hilbert { set, m, dmax } => {
            let prof = hilbert_profile_with(&set.load()?, *m, *dmax, &limits)?;
            ok(match cli.format {
                Format::Json => json_text(&prof),
                Format::Csv => prof.to_csv(),
            })
        }
        Command::Closure { set, d } => {
            let r = multiplicity_closure_with(&set.load()?, *d, 1, 1, &limits)?;
            ok(match cli.format {
                Format::Json => json_text(&r),
                Format::Csv => closure_csv(&r),
            })
        }
        Command::Mclosure { set, d, l, m } => {
            let r = multiplicity_closure_with(&set.load()?, *d, *l, *m, &limits)?;
            ok(match cli.format {
                Format::Json => json_text(&r),
                Format::Csv => closure_csv(&r),
            })
        }
        Command::Gen(g) => {
            if cli.format == Format::Csv {
                return Err(CliError::Unsupported("gen writes JSON only".into()));
            }
            let text = match g {
                GenCommand::Lines { q, n, count, tau } => json_text(&partial_lines_instance(*q, *n, *count, *tau, cli.seed)?),
                GenCommand::Nikodym { q, n, tau } => json_text(&nikodym_instance(*q, *n, *tau, cli.seed, &limits)?),
                GenCommand::Product { q, sets } => {
                    let factors: Vec<Vec<u32>> = parse_json(sets, "--sets")?;
                    json_text(&product_set(&FiniteField::with_order(*q)?, &factors)?)
                }
                GenCommand::Curve { q, components, lambda, tau } => {
                    let comps: Vec<Vec<u32>> = parse_json(components, "--components")?;
                    let spec = CurveSpec::new(&FiniteField::with_order(*q)?, comps, *lambda)?;
                    json_text(&curve_instance(&spec, *tau, cli.seed)?)
                }
            };
            ok(text)
        }
        Command::Verify { theorem, instance } => {
            let inst = load_instance(instance)?;
            emit_reports(&verify(&verifier, *theorem, &inst)?, cli.format)
        }
        Command::Sweep { q, n, d_min, d_max, mode, samples } => {
            let cfg = SweepConfig { q: *q, n: *n, d_min: *d_min, d_max: *d_max, mode: *mode, samples: *samples, seed: cli.seed };
            let report = verifier.sweep(&cfg)?;
            let text = match cli.format {
                Format::Json => json_text(&report),
                Format::Csv => reports_to_csv(&report.reports)?,
            };
            Ok(Output { text, ok: report.violations == 0 })
        }
        Command::FkgCheck { functions } => {
            let lf: LatticeFunctions = parse_json(&read_file(functions)?, &functions.display().to_string())?;
            let r = fkg_check(&lf, &limits)?;
            let text = match cli.format {
                Format::Json => json_text(&r),
                Format::Csv => format!(
                    "log_supermodular,f_monotone,g_monotone,hypotheses_hold,lhs,rhs,inequality_holds\n{},{},{},{},{},{},{}\n",
                    r.log_supermodular,
                    serde_json::to_value(r.f_monotone).expect("serializes").as_str().unwrap_or_default(),
                    serde_json::to_value(r.g_monotone).expect("serializes").as_str().unwrap_or_default(),
                    r.hypotheses_hold,
                    r.lhs,
                    r.rhs,
                    r.inequality_holds
                ),
            };
            for flag in &r.flags {
                eprintln!("flag: {flag}");
            }
            Ok(Output { text, ok: !r.hypotheses_hold || r.inequality_holds })
        }
    }
}

/// Parses arguments, runs, writes output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &out.text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if out.ok {
        0
    } else {
        eprintln!("bound violated");
        1
    }
}
