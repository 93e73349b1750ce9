//! Acceptance criteria. Each criterion prints one pass/fail line; the test
//! fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use hardy_core::capacity::{
    classify_parabolicity, default_schedule, direct_capacity, radial_capacity, Parabolicity,
};
use hardy_core::eigen::first_eigenpair;
use hardy_core::functionals::{
    evaluate_sides, hardy_gap, l2_mass, random_test_functions, rayleigh_quotient, InequalityCase,
    InequalityKind,
};
use hardy_core::geometry::ModelManifold;
use hardy_core::grids::{build_grid, CoordinateRange, Spacing};
use hardy_core::optimize::{
    convergence_study, estimate_lambda1, log_substitution_oracle, minimize_quotient_p2,
};
use hardy_core::suite::{
    run_config, run_suite, RunOptions, Status, SuiteConfig, VerificationReport,
};
use hardy_core::weights::{chain_rule_identity_check, rho_catalog_entry, WeightSpec};

type Outcome = Result<String, String>;

const E3: ModelManifold = ModelManifold::EuclideanRadial { dim: 3 };

fn config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance.json")
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn e3_hardy(lo: f64, hi: f64, n: usize) -> InequalityCase {
    let w = WeightSpec::power(E3, 2.0, -1.0).unwrap();
    InequalityCase::new(
        "hardy-e3",
        InequalityKind::Hardy,
        w,
        CoordinateRange::open(lo, hi),
        BTreeMap::new(),
    )
    .unwrap()
    .with_grid(n, Spacing::Logarithmic)
}

fn euclidean_hardy_sandwich() -> Outcome {
    let start = Instant::now();
    let case = e3_hardy(1e-4, 1e4, 4000);
    let r = minimize_quotient_p2(&case).map_err(|e| e.to_string())?;
    let oracle = 0.25 + (PI / (1e8f64).ln()).powi(2);
    let rel = (r.quotient / oracle - 1.0).abs();
    ensure(
        rel < 0.01,
        format!("quotient {} vs oracle {oracle}", r.quotient),
    )?;
    let grid = case.build_grid().unwrap();
    let mut lowest = r.quotient;
    for (_, q) in &r.history {
        lowest = lowest.min(*q);
    }
    for u in random_test_functions(&grid, 100, 1) {
        lowest = lowest.min(rayleigh_quotient(&case, &u).map_err(|e| e.to_string())?);
    }
    ensure(
        lowest >= 0.25 - 1e-6,
        format!("a quotient fell to {lowest}"),
    )?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!(
        "quotient {:.6} oracle {oracle:.6} (rel {rel:.1e}), min quotient {lowest:.6}, {secs:.2} s",
        r.quotient
    ))
}

fn half_plane_hardy_poincare() -> Outcome {
    let mut lines = Vec::new();
    for alpha in [0.0, -1.0, 3.0] {
        let bound = (1.0 - alpha) * (1.0f64 - alpha) / 4.0;
        let mut params = BTreeMap::new();
        params.insert("alpha".to_string(), alpha);
        let w = rho_catalog_entry("height", ModelManifold::HalfPlanePoincare, &params).unwrap();
        let mut prev = f64::INFINITY;
        for k in 2..=4 {
            let (lo, hi) = (10f64.powi(-k), 10f64.powi(k));
            let case = InequalityCase::new(
                "half-plane",
                InequalityKind::WeightedHardy,
                w.clone(),
                CoordinateRange::open(lo, hi),
                params.clone(),
            )
            .unwrap()
            .with_grid(2 * k as usize * 500 + 1, Spacing::Logarithmic);
            ensure(
                (case.constant - bound).abs() < 1e-15,
                format!("constant {} for alpha {alpha}", case.constant),
            )?;
            let q = minimize_quotient_p2(&case)
                .map_err(|e| e.to_string())?
                .quotient;
            let (limit, corr) = log_substitution_oracle(&case).ok_or("no oracle")?;
            ensure(
                q >= bound - 1e-6,
                format!("alpha {alpha}: quotient {q} below {bound}"),
            )?;
            ensure(
                (limit - bound).abs() < 1e-15,
                format!("oracle limit {limit}"),
            )?;
            let rel = ((q - limit) / corr - 1.0).abs();
            ensure(
                rel < 0.01,
                format!("alpha {alpha}: excess {} vs correction {corr}", q - limit),
            )?;
            ensure(q < prev, format!("alpha {alpha}: quotients not decreasing"))?;
            prev = q;
        }
        lines.push(format!("alpha {alpha}: {prev:.6} -> {bound}"));
    }
    Ok(lines.join("; "))
}

/// First eigenvalue of `-(|u'|^{p-2} u')' = λ |u|^{p-2} u` on (0, 1) with
/// Dirichlet ends, by shooting from `u(0) = 0, u'(0) = 1` with RK4 on
/// `(u, w = |u'|^{p-2} u')` and bisecting on the sign of `u(1)`.
fn shooting_eigenvalue(p: f64) -> f64 {
    let rhs = |lambda: f64, y: [f64; 2]| -> [f64; 2] {
        let du = y[1].abs().powf(1.0 / (p - 1.0)) * y[1].signum();
        let dw = -lambda * y[0].abs().powf(p - 1.0) * y[0].signum();
        [du, dw]
    };
    let end_value = |lambda: f64| -> f64 {
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        let mut y = [0.0, 1.0];
        for _ in 0..steps {
            let k1 = rhs(lambda, y);
            let k2 = rhs(lambda, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs(lambda, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs(lambda, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        y[0]
    };
    let (mut lo, mut hi) = (1.0, 100.0);
    assert!(end_value(lo) > 0.0 && end_value(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if end_value(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn poincare_eigenvalue() -> Outcome {
    let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
    let grid =
        |n| Arc::new(build_grid(CoordinateRange::closed(0.0, 1.0), n, Spacing::Linear).unwrap());
    let p2 = first_eigenpair(&iv, 2.0, &grid(2000)).map_err(|e| e.to_string())?;
    let err2 = (p2.lambda1 - PI * PI).abs();
    ensure(
        err2 < 1e-6,
        format!("p = 2: λ1 = {} (error {err2:.2e})", p2.lambda1),
    )?;
    let p3 = first_eigenpair(&iv, 3.0, &grid(2000)).map_err(|e| e.to_string())?;
    let shot = shooting_eigenvalue(3.0);
    let rel = (p3.lambda1 / shot - 1.0).abs();
    ensure(
        rel < 1e-3,
        format!("p = 3: λ1 = {} vs shooting {shot}", p3.lambda1),
    )?;
    Ok(format!(
        "p=2 λ1 {:.9} (error {err2:.1e}); p=3 λ1 {:.6} vs shooting {shot:.6} (rel {rel:.1e})",
        p2.lambda1, p3.lambda1
    ))
}

fn capacity_classification() -> Outcome {
    let mut wrong = Vec::new();
    for n in [2u32, 3, 4] {
        for p in [1.5, 2.0, 3.0, 4.0] {
            let m = ModelManifold::EuclideanRadial { dim: n };
            let c = classify_parabolicity(&m, p, 1.0, &default_schedule(1.0))
                .map_err(|e| e.to_string())?
                .classification;
            let want = if p >= n as f64 {
                Parabolicity::PParabolic
            } else {
                Parabolicity::PHyperbolic
            };
            if c != want {
                wrong.push(format!("N={n} p={p}: {c:?}"));
            }
        }
    }
    for p in [1.5, 2.0, 3.0] {
        let m = ModelManifold::HyperbolicRadial { dim: 2 };
        let c = classify_parabolicity(&m, p, 1.0, &default_schedule(1.0))
            .map_err(|e| e.to_string())?
            .classification;
        if c != Parabolicity::PHyperbolic {
            wrong.push(format!("H2 p={p}: {c:?}"));
        }
    }
    ensure(
        wrong.is_empty(),
        format!("misclassified: {}", wrong.join(", ")),
    )?;
    let e2 = ModelManifold::EuclideanRadial { dim: 2 };
    let mut worst: f64 = 0.0;
    for r in [1e3, 1e6] {
        let cap = radial_capacity(&e2, 2.0, 1.0, r)
            .map_err(|e| e.to_string())?
            .value;
        worst = worst.max((cap / (2.0 * PI / f64::ln(r)) - 1.0).abs());
    }
    let direct = direct_capacity(&e2, 2.0, 1.0, 1e3, 4000).map_err(|e| e.to_string())?;
    worst = worst.max((direct / (2.0 * PI / f64::ln(1e3)) - 1.0).abs());
    let cap3 = radial_capacity(&E3, 2.0, 1.0, 1e6)
        .map_err(|e| e.to_string())?
        .value;
    worst = worst.max((cap3 / (4.0 * PI) - 1.0).abs());
    ensure(worst < 5e-3, format!("capacity off by {worst:.2e}"))?;
    Ok(format!(
        "15/15 classifications, worst capacity error {worst:.1e}"
    ))
}

fn weight_confusion_table(report: &VerificationReport) -> Outcome {
    let total = report.weights.len();
    let right = report
        .weights
        .iter()
        .filter(|w| w.classification == w.expected)
        .count();
    ensure(total == 8, format!("catalog has {total} entries"))?;
    ensure(right == total, format!("{right}/{total} correct"))?;
    Ok(format!("{right}/{total} correct"))
}

fn property_suite(report: &VerificationReport, secs: f64) -> Outcome {
    let mut kinds = BTreeSet::new();
    for c in &report.cases {
        ensure(
            c.n_tests >= 50,
            format!("{} has {} tests", c.case_id, c.n_tests),
        )?;
        match c.status {
            Status::Pass | Status::Trivial => {
                kinds.insert(c.kind);
            }
            other => return Err(format!("{}: {other:?}", c.case_id)),
        }
    }
    let required = [
        InequalityKind::Hardy,
        InequalityKind::WeightedHardy,
        InequalityKind::Caccioppoli,
        InequalityKind::DivergenceLemma,
        InequalityKind::GagliardoNirenberg,
        InequalityKind::Uncertainty,
        InequalityKind::HardySobolev,
        InequalityKind::Ckn,
    ];
    for k in required {
        ensure(kinds.contains(&k), format!("no passing {k} case"))?;
    }
    let min_rel = report
        .cases
        .iter()
        .filter_map(|c| c.min_relative_margin)
        .fold(f64::INFINITY, f64::min);
    ensure(secs < 60.0, format!("suite took {secs:.1} s"))?;
    Ok(format!(
        "{} cases, min relative margin {min_rel:.3e}, {secs:.2} s",
        report.cases.len()
    ))
}

fn non_attainment_and_remainder() -> Outcome {
    let study = convergence_study(&e3_hardy(1e-4, 1e4, 4000), 3).map_err(|e| e.to_string())?;
    let qs: Vec<f64> = study.levels.iter().map(|l| l.result.quotient).collect();
    ensure(
        qs.windows(2).all(|w| w[1] < w[0]),
        format!("quotients {qs:?}"),
    )?;
    ensure(
        study.levels.iter().all(|l| l.gap > 0.0),
        "a minimizer has nonpositive gap".to_string(),
    )?;

    let rho = WeightSpec::power(E3, 2.0, -1.0).unwrap();
    let mut lambdas = Vec::new();
    for k in [3, 4, 5] {
        // the puncture is excised, the unit sphere is a Dirichlet boundary
        let range = CoordinateRange {
            open_hi: false,
            ..CoordinateRange::open(10f64.powi(-k), 1.0)
        };
        lambdas.push(
            estimate_lambda1(&E3, &rho, range, 500 * k as usize + 1).map_err(|e| e.to_string())?,
        );
    }
    let (lo, hi) = lambdas
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
    ensure(
        lo > 0.0 && hi / lo - 1.0 < 0.02,
        format!("Λ1 estimates {lambdas:?}"),
    )?;

    let case = InequalityCase::new(
        "remainder",
        InequalityKind::HardyRemainder,
        rho,
        CoordinateRange {
            open_hi: false,
            ..CoordinateRange::open(1e-4, 1.0)
        },
        BTreeMap::new(),
    )
    .unwrap()
    .with_grid(2001, Spacing::Logarithmic);
    let grid = case.build_grid().unwrap();
    let lambda = lambdas[1];
    let mut min_ratio = f64::INFINITY;
    for u in random_test_functions(&grid, 50, 7) {
        let gap = hardy_gap(&case, &u).map_err(|e| e.to_string())?;
        let mass = l2_mass(&E3, &u).map_err(|e| e.to_string())?;
        min_ratio = min_ratio.min(gap / (lambda * mass));
    }
    ensure(
        min_ratio >= 0.98,
        format!("gap / (Λ1 int u^2) fell to {min_ratio}"),
    )?;
    Ok(format!(
        "quotients {:.6} > {:.6} > {:.6}; Λ1 {:.5}..{:.5}; min gap ratio {min_ratio:.3}",
        qs[0], qs[1], qs[2], lo, hi
    ))
}

fn reduction_identities() -> Outcome {
    let w = WeightSpec::power(E3, 2.0, -1.0).unwrap();
    let range = CoordinateRange::open(1e-3, 1e3);
    let mut p0 = BTreeMap::new();
    p0.insert("alpha".to_string(), 0.0);
    let hardy = InequalityCase::new(
        "h",
        InequalityKind::Hardy,
        w.clone(),
        range,
        BTreeMap::new(),
    )
    .unwrap()
    .with_grid(2000, Spacing::Logarithmic);
    let weighted = InequalityCase::new("w", InequalityKind::WeightedHardy, w.clone(), range, p0)
        .unwrap()
        .with_grid(2000, Spacing::Logarithmic);
    let grid = hardy.build_grid().unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let mut worst: f64 = 0.0;
    for u in random_test_functions(&grid, 20, 3) {
        let a = evaluate_sides(&hardy, &u).map_err(|e| e.to_string())?;
        let b = evaluate_sides(&weighted, &u).map_err(|e| e.to_string())?;
        worst = worst
            .max(rel(a.lhs, b.lhs))
            .max(rel(a.rhs, b.rhs))
            .max(rel(a.margin, b.margin));
    }
    ensure(
        worst <= 1e-12,
        format!("weighted vs plain differ by {worst:.2e}"),
    )?;

    let mut hs = BTreeMap::new();
    for (k, v) in [("S", 2.3404922750), ("theta", -0.5), ("pstar", 6.0)] {
        hs.insert(k.to_string(), v);
    }
    let mut ckn = hs.clone();
    for (k, v) in [
        ("r", 6.0),
        ("a", 1.0),
        ("gamma", 0.5),
        ("eps", -0.5),
        ("delta", 1.0),
        ("sigma", 0.0),
    ] {
        ckn.insert(k.to_string(), v);
    }
    let hs_case = InequalityCase::new("hs", InequalityKind::HardySobolev, w.clone(), range, hs)
        .map_err(|e| e.to_string())?
        .with_grid(2000, Spacing::Logarithmic);
    let ckn_case = InequalityCase::new("ckn", InequalityKind::Ckn, w, range, ckn)
        .map_err(|e| e.to_string())?
        .with_grid(2000, Spacing::Logarithmic);
    let mut worst_ckn = rel(hs_case.constant, ckn_case.constant);
    for u in random_test_functions(&grid, 20, 4) {
        let a = evaluate_sides(&hs_case, &u).map_err(|e| e.to_string())?;
        let b = evaluate_sides(&ckn_case, &u).map_err(|e| e.to_string())?;
        worst_ckn = worst_ckn.max(rel(a.lhs, b.lhs)).max(rel(a.rhs, b.rhs));
    }
    ensure(
        worst_ckn <= 1e-12,
        format!("ckn vs hardy-sobolev differ by {worst_ckn:.2e}"),
    )?;

    let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
    let x = WeightSpec::power(iv, 2.0, 1.0).unwrap();
    let g = build_grid(CoordinateRange::closed(0.1, 1.0), 1001, Spacing::Linear).unwrap();
    let chain = chain_rule_identity_check(&x, 0.5, &g).map_err(|e| e.to_string())?;
    ensure(chain < 1e-4, format!("chain rule error {chain:.2e}"))?;
    Ok(format!(
        "weighted/plain {worst:.1e}, ckn/hardy-sobolev {worst_ckn:.1e}, chain rule {chain:.1e}"
    ))
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut texts = Vec::new();
    for d in &dirs {
        let opts = RunOptions {
            out_dir: Some(d.path().to_path_buf()),
            ..RunOptions::default()
        };
        run_suite(&config_path(), &opts).map_err(|e| e.to_string())?;
        texts.push(std::fs::read(d.path().join("report.json")).map_err(|e| e.to_string())?);
    }
    ensure(texts[0] == texts[1], "reports differ".to_string())?;
    Ok(format!("two runs, {} identical bytes", texts[0].len()))
}

#[test]
fn acceptance_criteria() {
    let cfg = SuiteConfig::load(&config_path()).expect("bundled config");
    let start = Instant::now();
    let report = run_config(&cfg, &RunOptions::default()).expect("bundled suite runs");
    let suite_secs = start.elapsed().as_secs_f64();

    let results: Vec<(&str, Outcome)> = vec![
        ("1 euclidean hardy sandwich", euclidean_hardy_sandwich()),
        ("2 half-plane hardy-poincare", half_plane_hardy_poincare()),
        ("3 poincare eigenvalue", poincare_eigenvalue()),
        ("4 capacity classification", capacity_classification()),
        (
            "5 hypothesis confusion table",
            weight_confusion_table(&report),
        ),
        (
            "6 inequality property suite",
            property_suite(&report, suite_secs),
        ),
        (
            "7 non-attainment and remainder",
            non_attainment_and_remainder(),
        ),
        ("8 reduction identities", reduction_identities()),
        ("9 determinism", determinism()),
    ];
    let mut failed = Vec::new();
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL criterion {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
