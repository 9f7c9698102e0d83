//! Property suites over seeded random instances, reported as JSON.
//!
//! Each suite is a list of named checks; a check counts its cases and keeps
//! the first few counterexamples. Reports depend only on the seed and the
//! backend, so two runs with the same configuration are byte-identical
//! (wall-clock is opt-in).

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fixtures::{ball_only_example, interval_gluing, interval_pair, interval_tunnel};
use crate::gluing::{validate_gluing, GluedSpace};
use crate::io::{glued_to_json, scalars_to_json, space_to_json};
use crate::kantorovich::{dirac_to_pushforward_set, lipschitz_seminorm_of, w1, Measure, W1Method};
use crate::lipschitz::{
    band_lift, check_band_lift, compact_support_radius, extend_compact_support, lip_constant, lip_constant_on, mcshane_extend,
    mcshane_extend_lower, sup_norm, support, truncate_clip,
};
use crate::local_gh::{big_delta_r, delta_r, delta_r_alt, delta_r_closed_form, delta_r_equivalents, gh_inframetric, DeltaSearch};
use crate::metric_core::{
    closed_ball, eps_contained, hausdorff, one_sided, validate_metric, FiniteMetricSpace, PointSet, PointedSpace, Strictness,
};
use crate::random::{self, case_rng, Rng64};
use crate::scalar::{Ext, Scalar};
use crate::tunnels::{
    check_admissible, check_inversion, check_left_admissible, compose_contract, extent, local_propinquity, propinquity,
    propinquity_triangle, verify_fundamental, KFamily, Passage, PropSearch, Surd,
};

pub const SUITES: [&str; 11] = [
    "metric",
    "lipschitz",
    "kantorovich",
    "local_gh",
    "fundamental",
    "composition",
    "inframetric",
    "isometry",
    "compact",
    "classical",
    "negative",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Caps the number of random cases of every check.
    pub max_cases: Option<usize>,
    /// Deliberately corrupts a few computed values, to exercise the
    /// counterexample reporting.
    pub inject_fault: bool,
    /// Adds wall-clock milliseconds to each suite report.
    pub timing: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 1, max_cases: None, inject_fault: false, timing: false }
    }
}

impl VerifyConfig {
    fn cases(&self, n: usize) -> usize {
        self.max_cases.map_or(n, |m| m.min(n))
    }

    fn skew<S: Scalar>(&self, v: S) -> S {
        if self.inject_fault {
            v + S::ratio(1, 1000)
        } else {
            v
        }
    }
}

const KEEP: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub counterexamples: Vec<Value>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check { name: name.into(), cases: 0, failures: 0, counterexamples: Vec::new() }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < KEEP {
                self.counterexamples.push(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub backend: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run<S: Scalar>(suite: &str, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    if suite == "all" {
        return SUITES.iter().map(|s| run_one::<S>(s, cfg)).collect();
    }
    Ok(vec![run_one::<S>(suite, cfg)?])
}

pub fn run_one<S: Scalar>(suite: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match suite {
        "metric" => metric_suite::<S>(cfg),
        "lipschitz" => lipschitz_suite::<S>(cfg),
        "kantorovich" => kantorovich_suite::<S>(cfg),
        "local_gh" => local_gh_suite::<S>(cfg),
        "fundamental" => fundamental_suite::<S>(cfg),
        "composition" => composition_suite::<S>(cfg),
        "inframetric" => inframetric_suite::<S>(cfg),
        "isometry" => isometry_suite::<S>(cfg),
        "compact" => compact_suite::<S>(cfg),
        "classical" => classical_suite::<S>(cfg),
        "negative" => negative_suite::<S>(cfg),
        other => return Err(Error::Parse(format!("unknown suite {other:?}; expected one of {} or all", SUITES.join(", ")))),
    };
    Ok(SuiteReport { suite: suite.into(), backend: S::NAME.into(), checks, millis: cfg.timing.then(|| start.elapsed().as_millis()) })
}

pub fn report_json(reports: &[SuiteReport], cfg: &VerifyConfig) -> Value {
    let passed = reports.iter().all(SuiteReport::passed);
    json!({
        "seed": cfg.seed,
        "inject_fault": cfg.inject_fault,
        "passed": passed,
        "suites": reports,
    })
}

fn rng_for(cfg: &VerifyConfig, check: &str, i: usize) -> Rng64 {
    case_rng(cfg.seed, check, i)
}

fn s<S: Scalar>(v: &S) -> Value {
    v.to_json()
}

fn random_set(rng: &mut Rng64, n: usize) -> PointSet {
    let k = rng.gen_range(1..=n);
    PointSet::new(random::permutation(rng, n).into_iter().take(k).collect())
}

/// `a·max(0, min_k (c_k − d(p_k, ·)))` with every `p_k` in `ball(r)` and
/// `c_k ≤ r − d(x0, p_k)`: `|a|`-Lipschitz and supported in `ball(r)`.
fn bump<S: Scalar>(rng: &mut Rng64, space: &PointedSpace<S>, r: &S, a: &S) -> Vec<S> {
    let ball = space.ball(r);
    let centers: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| ball.indices()[rng.gen_range(0..ball.len())]).collect();
    let caps: Vec<S> = centers
        .iter()
        .map(|&p| {
            let room = r.clone() - space.space.d(space.basepoint, p).clone();
            room * S::ratio(rng.gen_range(1..=4), 4)
        })
        .collect();
    (0..space.len())
        .map(|x| {
            let v = centers
                .iter()
                .zip(&caps)
                .map(|(&p, c)| c.clone() - space.space.d(p, x).clone())
                .reduce(S::min_of)
                .expect("a center")
                .max_of(S::zero());
            a.clone() * v
        })
        .collect()
}

fn metric_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut valid = Check::new("validate_examples");
    let z = |v: &[&[i64]]| -> Vec<Vec<S>> { v.iter().map(|r| r.iter().map(|&x| S::from_i64(x)).collect()).collect() };
    valid.record(validate_metric(z(&[&[0, 1], &[1, 0]]), Strictness::Metric).is_ok(), || json!("two points"));
    valid.record(
        matches!(validate_metric(z(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]), Strictness::Metric), Err(Error::AxiomViolation(_))),
        || json!("triangle violation accepted"),
    );
    valid.record(validate_metric(z(&[&[0, 0], &[0, 0]]), Strictness::Pseudometric).is_ok(), || json!("pseudometric zero"));
    valid.record(validate_metric(z(&[&[0, 0], &[0, 0]]), Strictness::Metric).is_err(), || json!("metric zero accepted"));

    let mut haus = Check::new("hausdorff_metric_axioms");
    let mut incl = Check::new("eps_inclusion_threshold");
    for i in 0..cfg.cases(200) {
        let mut rng = rng_for(cfg, "hausdorff", i);
        let n = rng.gen_range(1..=8);
        let space: FiniteMetricSpace<S> = random::metric(&mut rng, n, 8, 2);
        let (a, b, c) = (random_set(&mut rng, n), random_set(&mut rng, n), random_set(&mut rng, n));
        let hab = hausdorff(&space, &a, &b).expect("nonempty");
        let hba = hausdorff(&space, &b, &a).expect("nonempty");
        let hac = hausdorff(&space, &a, &c).expect("nonempty");
        let hcb = hausdorff(&space, &c, &b).expect("nonempty");
        let ok = hab == hba && hab.leq(&(hac + hcb)) && (hab.is_zero() == (a == b));
        haus.record(ok, || json!({"n": n, "a": a.indices(), "b": b.indices(), "c": c.indices()}));
        let t = one_sided(&space, &b, &a).unwrap_fin();
        let below = t.clone() - S::ratio(1, 1000);
        let ok = eps_contained(&space, &b, &a, &t) && (t.is_zero() || !eps_contained(&space, &b, &a, &below));
        incl.record(ok, || json!({"n": n, "a": a.indices(), "b": b.indices()}));
    }

    let mut balls = Check::new("interval_balls");
    for n in 1..=cfg.cases(100) as i64 {
        let (x, _) = interval_pair::<S>(n);
        let g = interval_gluing::<S>(n);
        let two = S::from_i64(2);
        let ok = x.ball(&two) == PointSet::new(vec![0]) && hausdorff(&g.host, &g.ball_x(&two), &g.ball_y(&two)).is_ok_and(|h| h == two);
        balls.record(ok, || json!({"n": n}));
    }
    vec![valid, haus, incl, balls]
}

fn lipschitz_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut mc = Check::new("mcshane_contract");
    let mut clip = Check::new("clip_does_not_increase_lip");
    for i in 0..cfg.cases(300) {
        let mut rng = rng_for(cfg, "mcshane", i);
        let n = rng.gen_range(1..=8);
        let host: FiniteMetricSpace<S> = random::metric(&mut rng, n, 8, 2);
        let sub: Vec<usize> = random_set(&mut rng, n).indices().to_vec();
        let f: Vec<S> = random::function(&mut rng, sub.len(), 6, 2);
        let lip = lip_constant_on(&host, &sub, &f).expect("metric host");
        let l = lip.clone() + S::ratio(rng.gen_range(0..=2), 2);
        let up = mcshane_extend(&host, &sub, &f, &l).expect("nonempty");
        let lo = mcshane_extend_lower(&host, &sub, &f, &l).expect("nonempty");
        let ok = sub.iter().zip(&f).all(|(&z, v)| up[z].approx_eq(v) && lo[z].approx_eq(v))
            && lip_constant(&host, &up).is_ok_and(|v| v.leq(&l))
            && lip_constant(&host, &lo).is_ok_and(|v| v.leq(&l))
            && (0..n).all(|z| lo[z].leq(&up[z]));
        mc.record(ok, || json!({"n": n, "sub": sub, "f": scalars_to_json(&f)}));
        let m = S::ratio(rng.gen_range(0..=6), 2);
        let g = truncate_clip(&up, &m);
        let ok = lip_constant(&host, &g).is_ok_and(|v| v.leq(&lip_constant(&host, &up).unwrap())) && sup_norm(&g).leq(&m);
        clip.record(ok, || json!({"g": scalars_to_json(&up), "m": s(&m)}));
    }

    let mut ext = Check::new("compact_support_contract");
    for i in 0..cfg.cases(500) {
        let mut rng = rng_for(cfg, "compact_support", i);
        let n = rng.gen_range(1..=9);
        let host: FiniteMetricSpace<S> = random::metric(&mut rng, n, 8, 2);
        let sub: Vec<usize> = random_set(&mut rng, n).indices().to_vec();
        let x0 = rng.gen_range(0..sub.len());
        let r: S = random::rational(&mut rng, 1, 8, 2);
        let xs = PointedSpace::new(host.subspace(&sub), x0).expect("valid");
        let ball = xs.ball(&r);
        let f: Vec<S> = (0..sub.len()).map(|j| if ball.contains(j) { random::rational(&mut rng, -6, 6, 2) } else { S::zero() }).collect();
        let g = extend_compact_support(&host, &sub, x0, &f, &r).expect("support inside the ball");
        let lf = lip_constant(&xs.space, &f).expect("metric");
        let restricts = sub.iter().zip(&f).all(|(&z, v)| g[z].approx_eq(v));
        // a nonzero constant cannot keep Lipschitz constant 0 and vanish far
        // away; it is extended with slope 1
        let lip_ok = lip_constant(&host, &g).is_ok_and(|lg| if lf.is_zero() { lg.leq(&S::one()) } else { lg.approx_eq(&lf) });
        let norm_ok = sup_norm(&g).approx_eq(&sup_norm(&f));
        let rad = compact_support_radius(&host, &sub, &f, &r).expect("metric");
        let outer = closed_ball(&host, sub[x0], &rad);
        let mut supp_ok = support(&g).is_subset(&outer);
        if S::one().leq(&lf) {
            supp_ok &= support(&g).is_subset(&closed_ball(&host, sub[x0], &(r.clone() + sup_norm(&f))));
        }
        let ok = restricts && lip_ok && norm_ok && supp_ok;
        ext.record(ok, || {
            json!({"host": host.matrix().iter().map(|r| scalars_to_json(r)).collect::<Vec<_>>(), "sub": sub, "x0": x0,
                   "r": s(&r), "f": scalars_to_json(&f),
                   "clauses": {"restricts": restricts, "lip": lip_ok, "norm": norm_ok, "support": supp_ok}})
        });
    }

    let mut band = Check::new("band_lift_conclusions");
    let mut found = 0;
    let target = cfg.cases(500);
    for i in 0..target * 40 {
        if found == target {
            break;
        }
        let mut rng = rng_for(cfg, "band_lift", i);
        let g: GluedSpace<S> = if rng.gen_bool(0.5) {
            {
                let n = rng.gen_range(2..=9);
                random::host_gluing(&mut rng, n)
            }
        } else {
            let nx = rng.gen_range(1..=5);
            let ny = rng.gen_range(1..=5);
            random::correspondence_gluing(&mut rng, nx, ny)
        };
        let r: S = random::rational(&mut rng, 1, 8, 2);
        let escape = g.x.escape(&r);
        let x_img = g.image_x();
        let reach = match &escape {
            Ext::Fin(big) => g.y.ball(&(r.clone() + r.clone() + big.clone())),
            Ext::Inf => g.y.space.all(),
        };
        let need = reach
            .iter()
            .map(|j| crate::metric_core::dist_to_set(&g.host, g.embed_y[j], &x_img).unwrap_fin())
            .fold(g.base_gap().clone(), S::max_of);
        let eps = match &escape {
            Ext::Fin(big) if !need.less(&big.half()) => continue,
            Ext::Fin(big) => {
                if need.is_zero() || rng.gen_bool(0.5) {
                    (need.clone() + big.half()).half()
                } else {
                    need.clone()
                }
            }
            Ext::Inf => need.clone() + S::ratio(rng.gen_range(if need.is_zero() { 1 } else { 0 }..=2), 4),
        };
        if eps.is_zero() {
            continue;
        }
        let f = bump(&mut rng, &g.x, &r, &S::one());
        let lift = match band_lift(&f, &g, &r, &eps) {
            Ok(l) => l,
            Err(e) => {
                band.record(false, || json!({"error": e.to_string(), "gluing": glued_to_json(&g)}));
                found += 1;
                continue;
            }
        };
        let rep = check_band_lift(&f, &g, &r, &eps, &lift);
        band.record(
            rep.all(),
            || json!({"failed": rep.failures(), "gluing": glued_to_json(&g), "r": s(&r), "eps": s(&eps), "f": scalars_to_json(&f)}),
        );
        found += 1;
    }
    vec![mc, clip, ext, band]
}

fn kantorovich_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut pd = Check::new("primal_equals_dual");
    let mut dirac = Check::new("dirac_distance");
    let mut axioms = Check::new("w1_metric_axioms");
    let mut convex = Check::new("w1_convexity");
    let mut set = Check::new("dirac_to_set");
    for i in 0..cfg.cases(1000) {
        let mut rng = rng_for(cfg, "w1", i);
        let n = rng.gen_range(1..=20);
        let space: FiniteMetricSpace<S> = random::metric(&mut rng, n, 8, 2);
        let sn = lipschitz_seminorm_of(&space);
        let (mu, nu) = (random::measure::<S>(&mut rng, n), random::measure::<S>(&mut rng, n));
        let primal = cfg.skew(w1(&mu, &nu, &sn, W1Method::Primal).expect("metric").unwrap_fin());
        let dual = w1(&mu, &nu, &sn, W1Method::Dual).expect("bounded");
        pd.record(dual.leq_fin(&primal) && Ext::Fin(primal.clone()).leq(&dual), || {
            json!({"n": n, "mu": scalars_to_json(mu.weights()), "nu": scalars_to_json(nu.weights()), "primal": s(&primal), "dual": dual.to_json()})
        });
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let d = w1(&Measure::dirac(n, a), &Measure::dirac(n, b), &sn, W1Method::Both).expect("metric");
        dirac.record(
            d == Ext::Fin(space.d(a, b).clone()) || d.finite().is_some_and(|v| v.approx_eq(space.d(a, b))),
            || json!({"n": n, "a": a, "b": b}),
        );
        if n <= 10 && i < cfg.cases(200) {
            let xi = random::measure::<S>(&mut rng, n);
            let w = |p: &Measure<S>, q: &Measure<S>| w1(p, q, &sn, W1Method::Primal).expect("metric").unwrap_fin();
            let (mn, nm, mx, xn, mm) = (w(&mu, &nu), w(&nu, &mu), w(&mu, &xi), w(&xi, &nu), w(&mu, &mu));
            axioms.record(mn.approx_eq(&nm) && mn.leq(&(mx + xn)) && mm.is_zero(), || json!({"n": n}));
            let (m2, n2) = (random::measure::<S>(&mut rng, n), random::measure::<S>(&mut rng, n));
            let lam: S = random::rational(&mut rng, 0, 4, 4);
            let lhs = w(&mu.mix(&m2, &lam), &nu.mix(&n2, &lam));
            let rhs = lam.clone() * w(&mu, &nu) + (S::one() - lam.clone()) * w(&m2, &n2);
            convex.record(lhs.leq(&rhs), || json!({"n": n, "lambda": s(&lam)}));
            let target = random_set(&mut rng, n);
            let z = rng.gen_range(0..n);
            let closed = dirac_to_pushforward_set(z, &target, &space).unwrap_fin();
            let oracle = target
                .iter()
                .map(|t| w1(&Measure::dirac(n, z), &Measure::dirac(n, t), &sn, W1Method::Dual).expect("bounded").unwrap_fin())
                .reduce(S::min_of)
                .expect("nonempty");
            set.record(closed.approx_eq(&oracle), || json!({"n": n, "z": z, "set": target.indices()}));
        }
    }
    vec![pd, dirac, axioms, convex, set]
}

/// Radii at which balls of the gluing change, plus a few generic ones.
fn some_radius<S: Scalar>(rng: &mut Rng64, g: &GluedSpace<S>) -> S {
    let mut radii = g.x.radii();
    radii.extend(g.y.radii());
    radii.retain(|v| S::zero().less(v));
    if radii.is_empty() || rng.gen_bool(0.3) {
        return random::rational(rng, 1, 12, 2);
    }
    radii[rng.gen_range(0..radii.len())].clone()
}

fn local_gh_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut eq = Check::new("delta_r_forms_agree");
    let mut equiv = Check::new("delta_r_equivalents");
    let mut closed = Check::new("delta_r_closed_form");
    let mut mono = Check::new("delta_r_monotone_in_r");
    for i in 0..cfg.cases(1000) {
        let mut rng = rng_for(cfg, "delta", i);
        let g: GluedSpace<S> = if rng.gen_bool(0.5) {
            {
                let n = rng.gen_range(1..=12);
                random::host_gluing(&mut rng, n)
            }
        } else {
            let nx = rng.gen_range(1..=6);
            let ny = rng.gen_range(1..=6);
            random::correspondence_gluing(&mut rng, nx, ny)
        };
        let r = some_radius(&mut rng, &g);
        let d = cfg.skew(delta_r(&g, &r).expect("positive radius"));
        let alt = delta_r_alt(&g, &r).expect("positive radius");
        eq.record(
            d == alt || (!S::EXACT && d.approx_eq(&alt)),
            || json!({"gluing": glued_to_json(&g), "r": s(&r), "def": s(&d), "alt": s(&alt)}),
        );
        let at = delta_r_equivalents(&g, &r, &d).expect("positive radius");
        let mut ok = at.agree() && at.assertions[0];
        if S::zero().less(&d) {
            let below = delta_r_equivalents(&g, &r, &(d.clone() * S::ratio(999, 1000))).expect("positive radius");
            ok &= !below.assertions.iter().any(|&a| a);
        }
        equiv.record(ok, || json!({"gluing": glued_to_json(&g), "r": s(&r), "eps": s(&d), "assertions": at.assertions}));
        let cf = delta_r_closed_form(&g, &r).expect("positive radius");
        closed.record(cf.approx_eq(&d), || json!({"gluing": glued_to_json(&g), "r": s(&r)}));
        let r2 = r.clone() + random::rational::<S>(&mut rng, 1, 4, 2);
        mono.record(d.leq(&delta_r(&g, &r2).expect("positive")), || json!({"gluing": glued_to_json(&g), "r": s(&r), "r2": s(&r2)}));
    }

    let mut interval = Check::new("interval_delta");
    for n in 1..=cfg.cases(100) as i64 {
        let v = delta_r(&interval_gluing::<S>(n), &S::from_i64(2)).expect("positive");
        interval.record(v.approx_eq(&S::ratio(1, n + 1)), || json!({"n": n, "value": s(&v)}));
    }

    let mut conv = Check::new("convergence_equivalence");
    for i in 0..cfg.cases(50) {
        let mut rng = rng_for(cfg, "convergence", i);
        let (haus, delta, info) = convergence_family::<S>(&mut rng);
        conv.record(haus == delta, || json!({"family": info, "hausdorff": haus, "delta": delta}));
    }

    let mut tri = Check::new("big_delta_triangle");
    let search = DeltaSearch::Exact { nodes: 2_000_000 };
    for i in 0..cfg.cases(200) {
        let mut rng = rng_for(cfg, "big_delta_triangle", i);
        let spaces: Vec<PointedSpace<S>> = (0..3)
            .map(|_| {
                let n = rng.gen_range(1..=5);
                random::pointed(&mut rng, n)
            })
            .collect();
        let r: S = random::rational(&mut rng, 1, 8, 2);
        let (x, z, y) = (&spaces[0], &spaces[1], &spaces[2]);
        let dxz = big_delta_r(x, z, &r, &search).expect("small").value;
        let dzy = big_delta_r(z, y, &r, &search).expect("small").value;
        let big = r.clone() + dxz.clone().max_of(dzy) + S::ratio(1, 2);
        let lhs = big_delta_r(x, y, &r, &search).expect("small").value;
        let rhs = big_delta_r(x, z, &big, &search).expect("small").value + big_delta_r(z, y, &big, &search).expect("small").value;
        tri.record(lhs.leq(&rhs), || json!({"x": space_to_json(x), "z": space_to_json(z), "y": space_to_json(y), "r": s(&r)}));
    }
    vec![eq, equiv, closed, mono, interval, conv, tri]
}

/// A family `X_k ⊂ ℝ` against a fixed `X`, with `X_k` moving by `c·2^{-k}`
/// (convergent) or keeping a stray point at a fixed distance (divergent,
/// possibly only far from the basepoint). Returns whether the Hausdorff
/// distances and whether all `δ_r` on a radius grid tend to 0, each decided
/// from the last term against `1e-6`.
fn convergence_family<S: Scalar>(rng: &mut Rng64) -> (bool, bool, Value) {
    let k = rng.gen_range(2..=5);
    let mut base: Vec<S> = vec![S::zero()];
    while base.len() < k {
        let c: S = random::rational(rng, -12, 12, 2);
        if !base.contains(&c) {
            base.push(c);
        }
    }
    let kind = rng.gen_range(0..3);
    let stray: S = match kind {
        0 => S::zero(),
        // near the basepoint
        1 => random::rational(rng, 1, 3, 4),
        // only visible at large radii
        _ => S::from_i64(20) + random::rational(rng, 0, 8, 2),
    };
    let moves: Vec<i64> = (0..k).map(|_| rng.gen_range(-1..=1)).collect();
    let thr = S::from_f64(1e-6).expect("finite");
    let grid: Vec<S> = [1, 2, 3, 5, 8, 12, 20, 30, 50, 80].iter().map(|&v| S::ratio(v, 2)).collect();
    let last = 40;
    let step = S::ratio(1, 1 << 20) * S::ratio(1, 1 << 20);
    let mut xk: Vec<S> = base.iter().zip(&moves).map(|(c, &m)| c.clone() + step.clone() * S::from_i64(m)).collect();
    if !stray.is_zero() {
        let top = base.iter().cloned().reduce(S::max_of).expect("nonempty");
        xk.push(top + stray.clone());
    }
    let mut coords = xk.clone();
    coords.extend(base.iter().cloned());
    let host = FiniteMetricSpace::from_line(&coords);
    let nx = xk.len();
    let g = GluedSpace::from_host(host, (0..nx).collect(), (nx..coords.len()).collect(), 0, 0).expect("line subsets");
    let h = hausdorff(&g.host, &g.image_x(), &g.image_y()).expect("nonempty");
    let haus = h.leq(&thr);
    let delta = grid.iter().all(|r| delta_r(&g, r).expect("positive").leq(&thr));
    let info = json!({"base": scalars_to_json(&base), "kind": kind, "stray": s(&stray), "term": last});
    (haus, delta, info)
}

fn fundamental_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut fund = Check::new("fundamental_random");
    let mut inv = Check::new("target_inversion");
    let mut sat = Check::new("diameter_saturation");
    for i in 0..cfg.cases(500) {
        let mut rng = rng_for(cfg, "fundamental", i);
        let nx = rng.gen_range(1..=4);
        let ny = rng.gen_range(1..=4);
        let g: GluedSpace<S> = random::correspondence_gluing(&mut rng, nx, ny);
        let p = Passage::metric(g);
        let r: S = random::rational(&mut rng, 1, 8, 2);
        let ext = extent(&p, &r).expect("positive radius");
        let Some(eps) = ext.admissible_within(&S::ratio(1, 8)) else {
            fund.record(false, || json!({"passage": glued_to_json(&p.carrier), "r": s(&r), "error": "no admissible eps"}));
            continue;
        };
        let k = KFamily::Maximal.k_at(&p, &r, &eps);
        let l: S = random::rational(&mut rng, 1, 6, 2);
        let a = bump(&mut rng, p.domain(), &r, &l);
        let a2 = bump(&mut rng, p.domain(), &r, &l);
        let t: S = random::rational(&mut rng, -4, 4, 2);
        match verify_fundamental(&p, &a, &a2, &l, &r, &eps, &k, &t) {
            Ok(rep) => {
                let ok = rep.all() && (!cfg.inject_fault || rep.diameter.less(&(l.clone() * eps.clone())));
                fund.record(ok, || {
                    json!({"passage": glued_to_json(&p.carrier), "r": s(&r), "eps": s(&eps), "l": s(&l), "a": scalars_to_json(&a),
                           "clauses": {"norm_bound": rep.norm_bound, "linearity": rep.linearity, "diameter": rep.diameter_bound,
                                       "jordan": rep.jordan, "lie": rep.lie}})
                });
            }
            Err(e) => fund.record(false, || json!({"passage": glued_to_json(&p.carrier), "r": s(&r), "error": e.to_string()})),
        }
        if i < cfg.cases(200) {
            let b = crate::tunnels::lift_target_bounds(&p, &a, &l, &r, &eps, &k).expect("admissible");
            let w: S = random::rational(&mut rng, 0, 4, 4);
            let target: Vec<S> =
                p.carrier.embed_y.iter().map(|&z| b.lo[z].clone() + w.clone() * (b.hi[z].clone() - b.lo[z].clone())).collect();
            // the convex combination of two extreme lifts is a lift
            let res = check_inversion(&p, &a, &target, &l, &r, &eps, &k);
            inv.record(
                matches!(res, Ok(Some(true))),
                || json!({"passage": glued_to_json(&p.carrier), "r": s(&r), "eps": s(&eps), "result": format!("{res:?}")}),
            );
        }
    }
    {
        let x = crate::fixtures::line::<S>(&[S::zero()]);
        let y = x.clone();
        let eps = S::ratio(1, 10);
        let g = GluedSpace::from_cross(&x, &y, &[vec![eps.clone()]]).expect("valid");
        let p = Passage::metric(g);
        let r = S::one();
        let k = p.carrier.host.all();
        for (c, l) in [(S::one(), S::from_i64(2)), (S::ratio(-3, 2), S::one()), (S::zero(), S::ratio(5, 2))] {
            let a = vec![c.clone()];
            let res = verify_fundamental(&p, &a, &a, &l, &r, &eps, &k, &S::one());
            let want = l.clone() * eps.clone() + l.clone() * eps.clone();
            sat.record(res.as_ref().is_ok_and(|rep| rep.all() && rep.diameter.approx_eq(&want)), || json!({"c": s(&c), "l": s(&l)}));
        }
    }
    vec![fund, inv, sat]
}

fn composition_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut contract = Check::new("compose_contract");
    let mut maximal = Check::new("compose_maximal_family");
    let mut bound = Check::new("compose_extent_bound");
    let mut seminorm = Check::new("composed_seminorm_is_path_metric");
    let target = cfg.cases(100);
    let mut found = 0;
    for i in 0..target * 20 {
        if found == target {
            break;
        }
        let mut rng = rng_for(cfg, "composition", i);
        let (nx, ny, nw) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let y: PointedSpace<S> = random::pointed(&mut rng, ny);
        let glue = |rng: &mut Rng64, a: &PointedSpace<S>, b: &PointedSpace<S>| -> GluedSpace<S> {
            let rel = crate::gluing::random_correspondence(a.len(), b.len(), rng);
            let eta = crate::gluing::correspondence_distortion(&rel, &a.space, &b.space).half() + random::rational::<S>(rng, 0, 1, 4);
            crate::gluing::glue_from_correspondence(a, b, &rel, &eta).expect("eta large enough")
        };
        let x: PointedSpace<S> = random::pointed(&mut rng, nx);
        let w: PointedSpace<S> = random::pointed(&mut rng, nw);
        let p1 = Passage::metric(glue(&mut rng, &x, &y));
        let p2 = Passage::metric(glue(&mut rng, &y, &w));
        let r: S = random::rational(&mut rng, 8, 40, 2);
        let t: S = random::rational(&mut rng, 1, 6, 2);
        let alpha: S = random::rational(&mut rng, 1, 4, 8);
        let rep = match compose_contract(&p1, &p2, &r, &t, &alpha) {
            Ok(rep) => rep,
            Err(Error::RadiusConditionViolated(_)) => continue,
            Err(e) => {
                contract.record(false, || json!({"error": e.to_string()}));
                found += 1;
                continue;
            }
        };
        found += 1;
        let info = || {
            json!({"first": glued_to_json(&p1.carrier), "second": glued_to_json(&p2.carrier), "r": s(&r), "t": s(&t),
                   "alpha": s(&alpha), "eps1": s(&rep.eps1), "eps2": s(&rep.eps2),
                   "failure": rep.composite.failure.as_ref().map(|f| f.describe())})
        };
        contract.record(rep.composite.holds(), info);
        maximal.record(rep.maximal.holds(), info);
        bound.record(rep.extent.value.leq_fin(&rep.bound) && rep.passage.carrier.base_gap().leq(&rep.bound), info);
        if let Some(c) = &rep.passage.composition {
            let n = rep.passage.carrier.host.len();
            let f: Vec<S> = random::function(&mut rng, n, 6, 2);
            let via_seminorm = c.seminorm.eval(&f);
            let direct = lip_constant(&rep.passage.carrier.host, &f).map(Ext::Fin).unwrap_or(Ext::Inf);
            seminorm.record(
                via_seminorm == direct || via_seminorm.finite().zip(direct.finite()).is_some_and(|(a, b)| a.approx_eq(b)),
                || json!({"f": scalars_to_json(&f)}),
            );
        }
    }
    vec![contract, maximal, bound, seminorm]
}

fn small_space<S: Scalar>(rng: &mut Rng64, n: usize) -> PointedSpace<S> {
    let space: FiniteMetricSpace<S> = random::metric(rng, n, 4, 2);
    let base = rng.gen_range(0..n);
    PointedSpace::new(space, base).expect("valid")
}

/// Sizes in `1..=4` with every pairwise product within the exhaustive
/// budget of [`PropSearch`].
fn triple_sizes(rng: &mut Rng64, budget: usize) -> [usize; 3] {
    loop {
        let s = [rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4)];
        if s[0] * s[1] <= budget && s[0] * s[2] <= budget && s[1] * s[2] <= budget {
            return s;
        }
    }
}

fn inframetric_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut tri = Check::new("propinquity_triangle");
    let mut sym = Check::new("propinquity_symmetric");
    let mut exh = Check::new("search_exhaustive");
    let search = PropSearch::default();
    for i in 0..cfg.cases(200) {
        let mut rng = rng_for(cfg, "inframetric", i);
        let [na, nb, nd] = triple_sizes(&mut rng, search.budget);
        let (a, b, d) = (small_space::<S>(&mut rng, na), small_space::<S>(&mut rng, nb), small_space::<S>(&mut rng, nd));
        let run = |x: &PointedSpace<S>, y: &PointedSpace<S>| propinquity(x, y, &search, 14).expect("small");
        let (ab, ad, db, ba) = (run(&a, &b), run(&a, &d), run(&d, &b), run(&b, &a));
        let info = || json!({"a": space_to_json(&a), "b": space_to_json(&b), "d": space_to_json(&d)});
        tri.record(propinquity_triangle(&ab, &ad, &db), info);
        sym.record(ab == ba, info);
        exh.record(ab.exhaustive && ad.exhaustive && db.exhaustive, info);
    }
    vec![tri, sym, exh]
}

fn isometry_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut zero = Check::new("identity_extent_zero");
    let mut prop = Check::new("propinquity_zero");
    let mut gh = Check::new("gh_inframetric_zero");
    let search = PropSearch::default();
    for i in 0..cfg.cases(100) {
        let mut rng = rng_for(cfg, "isometry", i);
        let n = rng.gen_range(1..=5);
        let x: PointedSpace<S> = random::pointed(&mut rng, n);
        let perm = random::permutation(&mut rng, n);
        let y = x.permuted(&perm);
        let g = GluedSpace::new(x.space.clone(), x.clone(), y.clone(), (0..n).collect(), perm.clone());
        let info = || json!({"x": space_to_json(&x), "perm": perm});
        let Ok(g) = g else {
            zero.record(false, info);
            continue;
        };
        let p = Passage::metric(g);
        let diam = x.space.diameter();
        let radii = [S::ratio(1, 2), S::one(), diam.clone() + S::one(), S::from_i64(10)];
        let ok = radii.iter().all(|r| extent(&p, r).is_ok_and(|e| e.value == Ext::Fin(S::zero())));
        zero.record(ok, info);
        let pr = propinquity(&x, &y, &search, 8);
        prop.record(pr.as_ref().is_ok_and(|v| v.raw == Ext::Fin(S::zero()) && v.truncated == Some(Surd::floor())), info);
        let ig = gh_inframetric(&x, &y, &DeltaSearch::default());
        gh.record(ig.as_ref().is_ok_and(|v| v.untruncated.is_zero() && v.truncated == S::ratio(1, 2)), info);
    }
    vec![zero, prop, gh]
}

fn compact_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut same = Check::new("extent_constant_above_diameters");
    let mut full = Check::new("admissible_k_is_whole_carrier");
    for i in 0..cfg.cases(50) {
        let mut rng = rng_for(cfg, "compact", i);
        let nx = rng.gen_range(1..=4);
        let ny = rng.gen_range(1..=4);
        let g: GluedSpace<S> = random::correspondence_gluing(&mut rng, nx, ny);
        let p = Passage::metric(g);
        let d = p.domain().space.diameter().max_of(p.codomain().space.diameter()).max_of(S::ratio(1, 2));
        let radii = [d.clone(), d.clone() + S::ratio(1, 2), d.clone() + d.clone() + S::one(), d.clone() * S::from_i64(10)];
        let extents: Vec<Ext<S>> = radii.iter().map(|r| extent(&p, r).expect("positive").value).collect();
        let info = || json!({"passage": glued_to_json(&p.carrier)});
        same.record(extents.iter().all(|e| *e == extents[0]), info);
        let e = extent(&p, &radii[0]).expect("positive");
        let Some(eps) = e.witness.clone() else {
            full.record(false, info);
            continue;
        };
        let all = p.carrier.host.all();
        let inv = p.inverse();
        let mut ok = true;
        for r in &radii {
            ok &= KFamily::Maximal.k_at(&p, r, &eps) == all && check_admissible(&p, r, &eps, &KFamily::Maximal).is_ok_and(|a| a.holds());
            for z in all.iter() {
                let k: PointSet = all.iter().filter(|&w| w != z).collect();
                let left = check_left_admissible(&p, r, &eps, &k).expect("valid");
                let right = check_left_admissible(&inv, r, &eps, &k).expect("valid");
                ok &= left.is_some() || right.is_some();
            }
        }
        full.record(ok, info);
    }
    vec![same, full]
}

fn classical_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut adm = Check::new("interval_tunnel_admissible");
    let mut upper = Check::new("local_propinquity_bound");
    let mut decr = Check::new("bounds_decrease");
    let two = S::from_i64(2);
    let search = PropSearch::default();
    let mut prev: Option<S> = None;
    for n in 1..=cfg.cases(100) as i64 {
        let eps = S::ratio(1, n + 1);
        let p = Passage::metric(interval_tunnel::<S>(n));
        let ok = check_admissible(&p, &two, &eps, &KFamily::Canonical).is_ok_and(|a| a.holds());
        adm.record(ok, || json!({"n": n}));
        let (x, y) = interval_pair::<S>(n);
        let searched = local_propinquity(&x, &y, &two, &search).expect("small").value;
        let tunnel = extent(&p, &two).expect("positive").value;
        let bound = searched.min_of(tunnel).unwrap_fin();
        upper.record(bound.leq(&eps), || json!({"n": n, "bound": s(&bound)}));
        if let Some(pv) = &prev {
            decr.record(bound.less(pv), || json!({"n": n, "bound": s(&bound), "previous": s(pv)}));
        }
        prev = Some(bound);
    }
    vec![adm, upper, decr]
}

fn negative_suite<S: Scalar>(cfg: &VerifyConfig) -> Vec<Check> {
    let mut rejected = Check::new("ball_only_rejected");
    let mut degenerate = Check::new("ball_only_value_vanishes");
    let mut honest = Check::new("honest_delta_positive");
    let mut prev: Option<S> = None;
    let one = S::one();
    let mut honest_value: Option<S> = None;
    for k in [4, 8, 16, 32] {
        let eps = S::ratio(1, k);
        let ex = ball_only_example(&eps);
        let ok = ex.isometric_on_ball()
            && matches!(ex.glue(), Err(Error::NotDistancePreserving(..)))
            && validate_gluing(&ex.host(), &ex.x, &ex.y, &ex.embed_x, &ex.embed_y).is_err();
        rejected.record(ok, || json!({"eps": s(&eps)}));
        let v = ex.ball_only_value();
        let ok = v.leq(&(eps.clone() + eps.clone())) && prev.as_ref().is_none_or(|p| v.less(p));
        degenerate.record(ok, || json!({"eps": s(&eps), "value": s(&v)}));
        prev = Some(v);
        if honest_value.is_none() {
            honest_value = big_delta_r(&ex.x, &ex.y, &one, &DeltaSearch::Exact { nodes: 5_000_000 }).ok().map(|d| d.value);
            let h = honest_value.clone();
            honest.record(h.as_ref().is_some_and(|h| S::zero().less(&cfg.skew(h.clone()))), || json!({"value": h.as_ref().map(s)}));
        }
    }
    vec![rejected, degenerate, honest]
}
