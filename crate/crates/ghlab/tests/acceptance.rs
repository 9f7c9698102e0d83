//! Acceptance criteria 1-12, one PASS/FAIL line each.
//!
//! Every criterion is read off the verification suites at seed 1 with the
//! exact backend; criterion 3 is also run with the float backend, where the
//! convergence decision uses the threshold 1e-6.

use std::process::ExitCode;
use std::time::Instant;

use ghlab::verify::{run_one, SuiteReport, VerifyConfig};
use ghlab::{Scalar, Q};

struct Criterion {
    id: u8,
    title: &'static str,
    /// (suite, check, minimum number of cases)
    checks: &'static [(&'static str, &'static str, usize)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "delta_r forms agree and the four equivalents hold at eps = delta_r",
        checks: &[
            ("local_gh", "delta_r_forms_agree", 1000),
            ("local_gh", "delta_r_equivalents", 1000),
            ("local_gh", "delta_r_closed_form", 1000),
        ],
    },
    Criterion {
        id: 2,
        title: "interval balls, Hausdorff 2, delta_2 = 1/(n+1) for n <= 100",
        checks: &[("metric", "interval_balls", 100), ("local_gh", "interval_delta", 100)],
    },
    Criterion {
        id: 3,
        title: "Hausdorff convergence iff delta_r -> 0 on a 10-radius grid",
        checks: &[("local_gh", "convergence_equivalence", 50)],
    },
    Criterion {
        id: 4,
        title: "compact-support extension and band lift contracts",
        checks: &[("lipschitz", "compact_support_contract", 500), ("lipschitz", "band_lift_conclusions", 500)],
    },
    Criterion {
        id: 5,
        title: "W1 primal = dual, Dirac distances, metric axioms, convexity",
        checks: &[
            ("kantorovich", "primal_equals_dual", 1000),
            ("kantorovich", "dirac_distance", 1000),
            ("kantorovich", "w1_metric_axioms", 50),
            ("kantorovich", "w1_convexity", 50),
        ],
    },
    Criterion {
        id: 6,
        title: "fundamental bounds on admissible tunnels, diameter saturation",
        checks: &[("fundamental", "fundamental_random", 500), ("fundamental", "diameter_saturation", 3)],
    },
    Criterion {
        id: 7,
        title: "composed tunnel admissible at eps1 + eps2 + alpha",
        checks: &[("composition", "compose_contract", 100), ("composition", "compose_extent_bound", 100)],
    },
    Criterion {
        id: 8,
        title: "truncated propinquity: 2-relaxed triangle and symmetry",
        checks: &[
            ("inframetric", "propinquity_triangle", 200),
            ("inframetric", "propinquity_symmetric", 200),
            ("inframetric", "search_exhaustive", 200),
        ],
    },
    Criterion {
        id: 9,
        title: "isometric copies: extent 0, raw propinquity 0, floors sqrt(2)/4 and 1/2",
        checks: &[
            ("isometry", "identity_extent_zero", 100),
            ("isometry", "propinquity_zero", 100),
            ("isometry", "gh_inframetric_zero", 100),
        ],
    },
    Criterion {
        id: 10,
        title: "extent constant above both diameters, admissible K is the carrier",
        checks: &[("compact", "extent_constant_above_diameters", 50), ("compact", "admissible_k_is_whole_carrier", 50)],
    },
    Criterion {
        id: 11,
        title: "interval tunnels admissible at eps = 1/(n+1), bounds decrease",
        checks: &[
            ("classical", "interval_tunnel_admissible", 100),
            ("classical", "local_propinquity_bound", 100),
            ("classical", "bounds_decrease", 99),
        ],
    },
    Criterion {
        id: 12,
        title: "ball-only embedding rejected, degenerate value only without validation",
        checks: &[
            ("negative", "ball_only_rejected", 4),
            ("negative", "ball_only_value_vanishes", 4),
            ("negative", "honest_delta_positive", 1),
        ],
    },
];

fn suite<'a>(reports: &'a mut Vec<SuiteReport>, name: &str, run: impl FnOnce() -> SuiteReport) -> &'a SuiteReport {
    if let Some(i) = reports.iter().position(|r| r.suite == name) {
        return &reports[i];
    }
    reports.push(run());
    reports.last().expect("just pushed")
}

fn verdict<S: Scalar>(reports: &mut Vec<SuiteReport>, checks: &[(&str, &str, usize)], cfg: &VerifyConfig) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(suite_name, name, min) in checks {
        let report = suite(reports, suite_name, || run_one::<S>(suite_name, cfg).expect("known suite"));
        match report.check(name) {
            Some(c) => {
                let good = c.failures == 0 && c.cases >= min;
                ok &= good;
                parts.push(format!("{name} {}/{}", c.cases - c.failures, c.cases));
                if !good {
                    for ce in &c.counterexamples {
                        parts.push(format!("counterexample {ce}"));
                    }
                }
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    (ok, parts.join(", "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = VerifyConfig::default();
    let mut exact: Vec<SuiteReport> = Vec::new();
    let mut float: Vec<SuiteReport> = Vec::new();
    let mut all = true;
    for c in CRITERIA {
        let (mut ok, mut detail) = verdict::<Q>(&mut exact, c.checks, &cfg);
        if c.id == 3 {
            let (fok, fdetail) = verdict::<f64>(&mut float, c.checks, &cfg);
            ok &= fok;
            detail = format!("rational: {detail}; float: {fdetail}");
        }
        all &= ok;
        println!("{} criterion {:>2}: {} ({detail})", if ok { "PASS" } else { "FAIL" }, c.id, c.title);
    }
    let secs = start.elapsed().as_secs_f64();
    let in_time = secs < 300.0;
    println!("{} runtime {secs:.1}s (limit 300s)", if in_time { "PASS" } else { "FAIL" });
    if all && in_time {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
