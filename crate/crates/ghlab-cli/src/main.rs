use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ghlab::io::{
    ext_to_json, glued_from_json, glued_to_json, measure_from_json, scalars_to_json, set_to_json, space_from_csv, space_from_json,
};
use ghlab::kantorovich::{lipschitz_seminorm_of, w1, w1_dual, W1Method};
use ghlab::local_gh::{big_delta_r, delta_r, delta_r_alt, delta_r_closed_form, delta_r_equivalents, gh_inframetric, DeltaSearch};
use ghlab::metric_core::{hausdorff, one_sided, PointSet, PointedSpace, Strictness};
use ghlab::tunnels::{check_admissible, extent, local_propinquity, propinquity, KFamily, Passage, PropSearch};
use ghlab::verify::{self, VerifyConfig};
use ghlab::{Error, Scalar, Q};

#[derive(Parser)]
#[command(name = "gh", version, about = "Local Gromov-Hausdorff quantities on finite pointed metric spaces")]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Config {
    /// Numeric backend.
    #[arg(long, global = true, env = "GHLAB_BACKEND", value_enum, default_value = "float")]
    backend: Backend,
    /// Comparison tolerance of the float backend.
    #[arg(long, global = true, env = "GHLAB_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, env = "GHLAB_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, env = "GHLAB_MODE", value_enum, default_value = "exact")]
    mode: Mode,
    /// Search nodes in exact mode, sampled relations in heuristic mode.
    #[arg(long, global = true, env = "GHLAB_BUDGET")]
    budget: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, env = "GHLAB_OUT")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Backend {
    Rational,
    Float,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact,
    Heuristic,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Distance computations.
    Dist {
        #[command(subcommand)]
        kind: Dist,
    },
    #[command(name = "hausdorff")]
    Hausdorff(HausdorffArgs),
    #[command(name = "delta-r")]
    DeltaR(GluedRadius),
    #[command(name = "Delta-r")]
    BigDeltaR(PairRadius),
    Inframetric(Pair),
    W1(W1Args),
    Extent(ExtentArgs),
    Propinquity(PropArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Clone)]
enum Dist {
    #[command(name = "hausdorff")]
    Hausdorff(HausdorffArgs),
    #[command(name = "delta-r")]
    DeltaR(GluedRadius),
    #[command(name = "Delta-r")]
    BigDeltaR(PairRadius),
    Inframetric(Pair),
    W1(W1Args),
    Extent(ExtentArgs),
    Propinquity(PropArgs),
}

#[derive(Args, Clone)]
struct SpaceInput {
    /// Basepoint of a CSV space.
    #[arg(long, default_value_t = 0)]
    basepoint: usize,
    /// Accept zero distances between distinct points.
    #[arg(long)]
    pseudometric: bool,
}

#[derive(Args, Clone)]
struct HausdorffArgs {
    /// A gluing; compares the images of X and Y.
    #[arg(long, conflicts_with = "space")]
    glued: Option<PathBuf>,
    /// A space, with the two subsets given by `--a` and `--b`.
    #[arg(long, requires_all = ["a", "b"])]
    space: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    a: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    b: Vec<usize>,
    #[command(flatten)]
    input: SpaceInput,
}

#[derive(Args, Clone)]
struct GluedRadius {
    #[arg(long)]
    glued: PathBuf,
    #[arg(short, long)]
    r: String,
}

#[derive(Args, Clone)]
struct Pair {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[command(flatten)]
    input: SpaceInput,
}

#[derive(Args, Clone)]
struct PairRadius {
    #[command(flatten)]
    pair: Pair,
    #[arg(short, long)]
    r: String,
}

#[derive(Args, Clone)]
struct W1Args {
    #[arg(long)]
    space: PathBuf,
    /// A JSON array of weights, inline or as a file.
    #[arg(long)]
    mu: String,
    #[arg(long)]
    nu: String,
    #[command(flatten)]
    input: SpaceInput,
}

#[derive(Args, Clone)]
struct ExtentArgs {
    /// A gluing read as a metric passage.
    #[arg(long)]
    passage: PathBuf,
    #[arg(short, long)]
    r: String,
}

#[derive(Args, Clone)]
struct PropArgs {
    #[command(flatten)]
    pair: Pair,
    /// Report the local propinquity at this radius instead.
    #[arg(short, long)]
    r: Option<String>,
    /// Bisection steps for the topographic value.
    #[arg(long, default_value_t = 24)]
    iters: usize,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Cap on the random cases of each check.
    #[arg(long)]
    cases: Option<usize>,
    /// Corrupt a few computed values to exercise counterexample reporting.
    #[arg(long, env = "GHLAB_INJECT_FAULT")]
    inject_fault: bool,
    /// Include wall-clock per suite (the report is then not reproducible).
    #[arg(long)]
    timing: bool,
}

const EXIT_FAILED: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_BUDGET: u8 = 5;

enum Failure {
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ghlab::scalar::set_float_tolerance(cli.cfg.tol);
    let res = match cli.cfg.backend {
        Backend::Rational => dispatch::<Q>(&cli.cmd, &cli.cfg),
        Backend::Float => dispatch::<f64>(&cli.cmd, &cli.cfg),
    };
    match res.and_then(|(report, ok)| emit(&report, cli.cfg.out.as_deref()).map(|_| ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(f) => {
            let (code, diag) = diagnostics(&f);
            eprintln!("{}", serde_json::to_string_pretty(&diag).expect("json"));
            ExitCode::from(code)
        }
    }
}

fn emit(report: &Value, out: Option<&Path>) -> Out<()> {
    let text = serde_json::to_string_pretty(report).expect("json") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn diagnostics(f: &Failure) -> (u8, Value) {
    match f {
        Failure::Io(m) => (EXIT_IO, json!({"error": "Io", "message": m})),
        Failure::Lib(e) => {
            let kind = format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
            let code = match e {
                Error::Parse(_) => EXIT_PARSE,
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                _ => EXIT_VALIDATION,
            };
            let mut diag = json!({"error": kind, "message": e.to_string()});
            if let Error::AxiomViolation(v) = e {
                diag["violations"] = v.iter().map(|x| json!(x.to_string())).collect();
            }
            (code, diag)
        }
    }
}

fn read(path: &Path) -> Out<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_json(text: &str) -> Out<Value> {
    serde_json::from_str(text).map_err(|e| Failure::Lib(Error::Parse(e.to_string())))
}

fn load_space<S: Scalar>(path: &Path, input: &SpaceInput) -> Out<PointedSpace<S>> {
    let text = read(path)?;
    let strict = if input.pseudometric { Strictness::Pseudometric } else { Strictness::Metric };
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return Ok(space_from_csv(&text, input.basepoint, strict)?);
    }
    let mut v = parse_json(&text)?;
    if input.pseudometric && v.get("strictness").is_none() {
        v["strictness"] = json!("pseudometric");
    }
    Ok(space_from_json(&v)?)
}

fn load_inline_or_file(arg: &str) -> Out<Value> {
    match serde_json::from_str(arg) {
        Ok(v) => Ok(v),
        Err(_) => parse_json(&read(Path::new(arg))?),
    }
}

fn radius<S: Scalar>(text: &str) -> Out<S> {
    S::parse(text).ok_or_else(|| Failure::Lib(Error::Parse(format!("not a number: {text:?}"))))
}

fn report(value: Value, witness: Value, mode: &str, certificate: Value) -> Value {
    json!({"value": value, "witness": witness, "mode": mode, "certificate": certificate})
}

fn delta_search(cfg: &Config) -> DeltaSearch {
    match cfg.mode {
        Mode::Exact => DeltaSearch::Exact { nodes: cfg.budget.unwrap_or(2_000_000) },
        Mode::Heuristic => DeltaSearch::Heuristic { seed: cfg.seed, samples: cfg.budget.unwrap_or(64) },
    }
}

fn prop_search(cfg: &Config) -> PropSearch {
    let mut s = PropSearch { seed: cfg.seed, ..PropSearch::default() };
    match cfg.mode {
        Mode::Exact => {
            if let Some(b) = cfg.budget {
                s.budget = b;
            }
        }
        Mode::Heuristic => {
            s.budget = 0;
            s.samples = cfg.budget.unwrap_or(s.samples);
        }
    }
    s
}

fn dispatch<S: Scalar>(cmd: &Command, cfg: &Config) -> Out<(Value, bool)> {
    let d = match cmd {
        Command::Dist { kind } => kind.clone(),
        Command::Hausdorff(a) => Dist::Hausdorff(a.clone()),
        Command::DeltaR(a) => Dist::DeltaR(a.clone()),
        Command::BigDeltaR(a) => Dist::BigDeltaR(a.clone()),
        Command::Inframetric(a) => Dist::Inframetric(a.clone()),
        Command::W1(a) => Dist::W1(a.clone()),
        Command::Extent(a) => Dist::Extent(a.clone()),
        Command::Propinquity(a) => Dist::Propinquity(a.clone()),
        Command::Verify(a) => return verify_cmd::<S>(a, cfg),
    };
    Ok((dist::<S>(&d, cfg)?, true))
}

fn verify_cmd<S: Scalar>(a: &VerifyArgs, cfg: &Config) -> Out<(Value, bool)> {
    let vc = VerifyConfig { seed: cfg.seed, max_cases: a.cases, inject_fault: a.inject_fault, timing: a.timing };
    let reports = verify::run::<S>(&a.suite, &vc)?;
    let ok = reports.iter().all(|r| r.passed());
    Ok((verify::report_json(&reports, &vc), ok))
}

fn dist<S: Scalar>(d: &Dist, cfg: &Config) -> Out<Value> {
    let exact = S::EXACT;
    Ok(match d {
        Dist::Hausdorff(a) => {
            let (space, sa, sb) = match (&a.glued, &a.space) {
                (Some(g), _) => {
                    let g = glued_from_json::<S>(&parse_json(&read(g)?)?)?;
                    let (ia, ib) = (g.image_x(), g.image_y());
                    (g.host, ia, ib)
                }
                (None, Some(p)) => {
                    let s = load_space::<S>(p, &a.input)?.space;
                    for &i in a.a.iter().chain(&a.b) {
                        if i >= s.len() {
                            return Err(Error::BadIndex(i).into());
                        }
                    }
                    (s, PointSet::new(a.a.clone()), PointSet::new(a.b.clone()))
                }
                (None, None) => return Err(Error::Parse("hausdorff needs --glued or --space".into()).into()),
            };
            let h = hausdorff(&space, &sa, &sb)?;
            let cert = json!({"a_in_b": one_sided(&space, &sa, &sb).to_json(), "b_in_a": one_sided(&space, &sb, &sa).to_json()});
            report(h.to_json(), json!({"a": set_to_json(&sa), "b": set_to_json(&sb)}), "exact", cert)
        }
        Dist::DeltaR(a) => {
            let g = glued_from_json::<S>(&parse_json(&read(&a.glued)?)?)?;
            let r: S = radius(&a.r)?;
            let v = delta_r(&g, &r)?;
            let eq = delta_r_equivalents(&g, &r, &v)?;
            let cert = json!({
                "alt_form": delta_r_alt(&g, &r)?.to_json(),
                "closed_form": delta_r_closed_form(&g, &r)?.to_json(),
                "equivalents_at_value": eq.assertions,
            });
            report(v.to_json(), json!({"k": set_to_json(&eq.k), "q": set_to_json(&eq.q)}), "exact", cert)
        }
        Dist::BigDeltaR(a) => {
            let x = load_space::<S>(&a.pair.x, &a.pair.input)?;
            let y = load_space::<S>(&a.pair.y, &a.pair.input)?;
            let r: S = radius(&a.r)?;
            let res = big_delta_r(&x, &y, &r, &delta_search(cfg))?;
            let mode = if res.exact { "exact" } else { "upper_bound" };
            let cert = json!({"delta_r_of_witness": delta_r(&res.witness, &r)?.to_json(), "relation": res.relation.pairs});
            report(res.value.to_json(), glued_to_json(&res.witness), mode, cert)
        }
        Dist::Inframetric(a) => {
            let x = load_space::<S>(&a.x, &a.input)?;
            let y = load_space::<S>(&a.y, &a.input)?;
            let v = gh_inframetric(&x, &y, &delta_search(cfg))?;
            let mode = if v.exact { "exact" } else { "upper_bound" };
            report(
                v.truncated.to_json(),
                Value::Null,
                mode,
                json!({"untruncated": v.untruncated.to_json(), "floor": S::ratio(1, 2).to_json()}),
            )
        }
        Dist::W1(a) => {
            let space = load_space::<S>(&a.space, &a.input)?.space;
            let n = space.len();
            let mu = measure_from_json::<S>(&load_inline_or_file(&a.mu)?, n)?;
            let nu = measure_from_json::<S>(&load_inline_or_file(&a.nu)?, n)?;
            let sn = lipschitz_seminorm_of(&space);
            let dual = w1_dual(&mu, &nu, &sn)?;
            let primal = if space.strictness() == Strictness::Metric || exact { w1(&mu, &nu, &sn, W1Method::Primal).ok() } else { None };
            let cert = json!({"dual": ext_to_json(&dual), "primal": primal.as_ref().map(ext_to_json)});
            report(ext_to_json(&dual), json!({"mu": scalars_to_json(mu.weights()), "nu": scalars_to_json(nu.weights())}), "exact", cert)
        }
        Dist::Extent(a) => {
            let g = glued_from_json::<S>(&parse_json(&read(&a.passage)?)?)?;
            let r: S = radius(&a.r)?;
            let p = Passage::metric(g);
            let e = extent(&p, &r)?;
            let cert = match &e.witness {
                Some(eps) => {
                    let adm = check_admissible(&p, &r, eps, &KFamily::Maximal)?;
                    let k = KFamily::Maximal.k_at(&p, &r, eps);
                    json!({"eps": eps.to_json(), "k": set_to_json(&k), "admissible": adm.holds(),
                           "checked_t": scalars_to_json(&adm.checked),
                           "failure": adm.failure.map(|f| f.describe())})
                }
                None => Value::Null,
            };
            let witness = json!({"eps": e.witness.as_ref().map(S::to_json), "interval_end": e.interval_end.as_ref().map(ext_to_json)});
            report(ext_to_json(&e.value), witness, "exact", cert)
        }
        Dist::Propinquity(a) => {
            let x = load_space::<S>(&a.pair.x, &a.pair.input)?;
            let y = load_space::<S>(&a.pair.y, &a.pair.input)?;
            let search = prop_search(cfg);
            match &a.r {
                Some(r) => {
                    let r: S = radius(r)?;
                    let lp = local_propinquity(&x, &y, &r, &search)?;
                    let mode = if lp.exhaustive { "exhaustive" } else { "upper_bound" };
                    let witness = lp.witness.as_ref().map(|p| glued_to_json(&p.carrier)).unwrap_or(Value::Null);
                    let cert = json!({"eps": lp.witness_eps.as_ref().map(S::to_json), "candidates": lp.candidates});
                    report(ext_to_json(&lp.value), witness, mode, cert)
                }
                None => {
                    let p = propinquity(&x, &y, &search, a.iters)?;
                    let mode = if p.exhaustive { "exhaustive" } else { "upper_bound" };
                    let value = p.truncated.as_ref().map(|t| json!({"exact": t.to_string(), "approx": t.to_f64()})).unwrap_or(Value::Null);
                    let cert = json!({"raw_lo": p.lo.to_json(), "raw_hi": ext_to_json(&p.raw), "saturation_radius": p.saturation_radius.to_json()});
                    report(value, Value::Null, mode, cert)
                }
            }
        }
    })
}
