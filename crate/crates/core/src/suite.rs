//! Configuration-driven verification suites and their reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{classify_parabolicity, default_schedule, Parabolicity};
use crate::eigen::first_eigenpair;
use crate::error::{Error, Result};
use crate::functionals::{
    case_seed, evaluate_sides, l2_mass, random_test_functions, InequalityCase, InequalityKind,
    SidePair, TOL_DISC,
};
use crate::geometry::ModelManifold;
use crate::grids::{build_grid, CoordinateRange, RadialGrid, Spacing};
use crate::optimize::{convergence_study, estimate_lambda1, minimize_quotient};
use crate::weights::{
    classify_weight, green_weight_radial, parse_catalog_name, rho_catalog_entry,
    weak_superharmonicity_check, Harmonicity, VectorFieldCase, WeightSpec,
};

/// Bumps per width in the hypothesis check.
const HYPOTHESIS_BUMPS: usize = 50;
/// Relative slack of the divergence hypothesis `A_h <= Div h`, which is
/// checked with a numerical derivative.
const TOL_DIVERGENCE: f64 = 1e-4;
/// Relative slack of the remainder bound `I(u) >= Λ1 int u^2`.
const TOL_REMAINDER: f64 = 0.02;

fn default_n_tests() -> usize {
    100
}

fn default_inner_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSpec {
    Killing,
    DaviesHinz,
}

/// One inequality case in a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    pub kind: InequalityKind,
    pub model: ModelManifold,
    /// Catalog name, `green` or `eigenfunction`.
    pub weight: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub range: CoordinateRange,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub spacing: Option<Spacing>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub n_tests: Option<usize>,
    /// Also minimise the quotient and check it against the constant.
    #[serde(default)]
    pub minimize: bool,
    /// Levels of a convergence study, if one is wanted.
    #[serde(default)]
    pub study_levels: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSpec {
    pub id: String,
    pub model: ModelManifold,
    pub p: f64,
    pub n: usize,
    #[serde(default)]
    pub expect: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySpec {
    pub id: String,
    pub model: ModelManifold,
    pub p: f64,
    #[serde(default = "default_inner_radius")]
    pub a: f64,
    #[serde(default)]
    pub expect: Option<Parabolicity>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightCheckSpec {
    pub id: String,
    pub model: ModelManifold,
    pub weight: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub range: CoordinateRange,
    pub n: usize,
    #[serde(default)]
    pub spacing: Option<Spacing>,
    pub expect: Harmonicity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub tol_disc: Option<f64>,
    #[serde(default = "default_n_tests")]
    pub n_tests: usize,
    /// Grid size for cases that do not set their own.
    #[serde(default)]
    pub default_n: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub cases: Vec<CaseSpec>,
    #[serde(default)]
    pub eigen: Vec<EigenSpec>,
    #[serde(default)]
    pub capacity: Vec<CapacitySpec>,
    #[serde(default)]
    pub weights: Vec<WeightCheckSpec>,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SuiteConfig::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        let ids = self
            .cases
            .iter()
            .map(|c| &c.id)
            .chain(self.eigen.iter().map(|c| &c.id))
            .chain(self.capacity.iter().map(|c| &c.id))
            .chain(self.weights.iter().map(|c| &c.id));
        for id in ids {
            if !seen.insert(id) {
                return Err(Error::Config(format!("duplicate id `{id}`")));
            }
        }
        if let Some(t) = self.tol_disc {
            if !(t >= 0.0) {
                return Err(Error::Config(format!(
                    "tol_disc must be nonnegative, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Command-line overrides of a config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tol_disc: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Degenerate constant: the inequality holds for trivial reasons.
    Trivial,
    /// The weight failed its hypothesis; the inequality was not tested.
    HypothesisFailed,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
}

impl GridInfo {
    fn of(grid: &RadialGrid) -> Self {
        GridInfo {
            n: grid.len(),
            lo: grid.lo(),
            hi: grid.hi(),
            spacing: grid.spacing(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    /// `+1` superharmonic, `-1` subharmonic, `0` divergence condition.
    pub sign: f64,
    pub pass: bool,
    pub worst_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderRecord {
    pub lambda1_hat: f64,
    /// Minimum over test functions of `I(u) / (Λ1 int u^2)`.
    pub min_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizationRecord {
    pub quotient: f64,
    pub iterations: usize,
    pub converged: bool,
    pub above_constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub quotient: f64,
    pub gap: f64,
    pub corrected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub levels: Vec<LevelRecord>,
    pub extrapolated: Option<f64>,
    pub monotone: bool,
    pub gaps_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub kind: InequalityKind,
    pub model: ModelManifold,
    pub weight: String,
    pub params: BTreeMap<String, f64>,
    pub constant: f64,
    pub grid: GridInfo,
    pub seed: u64,
    pub hypothesis: Option<HypothesisRecord>,
    pub status: Status,
    pub n_tests: usize,
    pub min_margin: Option<f64>,
    pub min_relative_margin: Option<f64>,
    /// Sides of the test function with the smallest relative margin.
    pub worst: Option<SidePair>,
    pub remainder: Option<RemainderRecord>,
    pub minimization: Option<MinimizationRecord>,
    pub convergence: Option<StudyRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub id: String,
    pub model: ModelManifold,
    pub p: f64,
    pub n: usize,
    pub lambda1: f64,
    pub residual: f64,
    pub converged: bool,
    pub expected: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub id: String,
    pub model: ModelManifold,
    pub p: f64,
    pub a: f64,
    pub schedule: Vec<f64>,
    pub values: Vec<f64>,
    pub ratio: f64,
    pub slope: f64,
    pub classification: Parabolicity,
    pub expected: Option<Parabolicity>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub id: String,
    pub model: ModelManifold,
    pub weight: String,
    pub classification: Harmonicity,
    pub expected: Harmonicity,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub n_checks: usize,
    pub n_pass: usize,
    pub n_fail: usize,
    pub n_trivial: usize,
    /// Cases excluded from the counts above.
    pub n_hypothesis_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub tol_disc: f64,
    pub cases: Vec<CaseRecord>,
    pub eigen: Vec<EigenRecord>,
    pub capacity: Vec<CapacityRecord>,
    pub weights: Vec<WeightRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    fn statuses(&self) -> impl Iterator<Item = Status> + '_ {
        self.cases
            .iter()
            .map(|c| c.status)
            .chain(self.eigen.iter().map(|c| c.status))
            .chain(self.capacity.iter().map(|c| c.status))
            .chain(self.weights.iter().map(|c| c.status))
    }

    fn summarize(&mut self) {
        let mut s = Summary::default();
        for st in self.statuses() {
            match st {
                Status::Pass => s.n_pass += 1,
                Status::Fail => s.n_fail += 1,
                Status::Trivial => s.n_trivial += 1,
                Status::HypothesisFailed => s.n_hypothesis_failed += 1,
            }
        }
        s.n_checks = s.n_pass + s.n_fail + s.n_trivial;
        self.summary = s;
    }

    pub fn passed(&self) -> bool {
        self.summary.n_fail == 0
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed report: {e}")))
    }
}

/// Pretty JSON with sorted keys and floats printed with 17 significant digits.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::invalid(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FloatFormatter::default());
    v.serialize(&mut ser)
        .map_err(|e| Error::invalid(e.to_string()))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Default)]
struct FloatFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for FloatFormatter {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(fmt_float(v).as_bytes())
    }

    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + std::io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + std::io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn default_spacing(model: &ModelManifold, range: &CoordinateRange) -> Spacing {
    if range.lo > 0.0 && !matches!(model, ModelManifold::Interval { .. }) {
        Spacing::Logarithmic
    } else {
        Spacing::Linear
    }
}

/// Resolves a weight name on a concrete grid. Sampled weights (`green`,
/// `eigenfunction`) are computed there; `eigenfunction` also records `λ1`
/// into the parameters.
fn resolve_weight(
    name: &str,
    model: ModelManifold,
    params: &mut BTreeMap<String, f64>,
    grid: &Arc<RadialGrid>,
) -> Result<WeightSpec> {
    let (family, inline) = parse_catalog_name(name)?;
    let p = inline.get("p").or(params.get("p")).copied().unwrap_or(2.0);
    match family.as_str() {
        "green" => green_weight_radial(model, p, grid),
        "eigenfunction" => {
            let pair = first_eigenpair(&model, p, grid)?;
            params.entry("lambda1".to_string()).or_insert(pair.lambda1);
            Ok(pair.weight())
        }
        _ => rho_catalog_entry(name, model, params),
    }
}

struct Resolved {
    case: InequalityCase,
    grid: Arc<RadialGrid>,
}

fn resolve_case(spec: &CaseSpec, default_n: usize) -> Result<Resolved> {
    let n = spec.n.unwrap_or(default_n);
    let spacing = spec
        .spacing
        .unwrap_or_else(|| default_spacing(&spec.model, &spec.range));
    let grid = Arc::new(build_grid(spec.range, n, spacing)?);
    let mut params = spec.params.clone();
    let weight = resolve_weight(&spec.weight, spec.model, &mut params, &grid)?;
    let mut case = InequalityCase::new(spec.id.clone(), spec.kind, weight, spec.range, params)?
        .with_grid(n, spacing);
    if let Some(field) = &spec.field {
        let p = case.p();
        let f = match field {
            FieldSpec::Killing => VectorFieldCase::killing(spec.model.dim(), p)?,
            FieldSpec::DaviesHinz => VectorFieldCase::davies_hinz(spec.model)?,
        };
        case = case.with_field(f);
    }
    Ok(Resolved { case, grid })
}

fn hypothesis(case: &InequalityCase, grid: &RadialGrid) -> Option<HypothesisRecord> {
    if let Some(field) = &case.field {
        let margin = field.divergence_margin(grid);
        return Some(HypothesisRecord {
            sign: 0.0,
            pass: margin >= -TOL_DIVERGENCE,
            worst_value: margin,
        });
    }
    let sign = case.kind.hypothesis_sign(case.p(), case.alpha());
    if sign == 0.0 {
        return None;
    }
    let c = weak_superharmonicity_check(&case.weight, grid, HYPOTHESIS_BUMPS, sign);
    Some(HypothesisRecord {
        sign,
        pass: c.pass,
        worst_value: c.worst_value,
    })
}

fn single_quotient(kind: InequalityKind) -> bool {
    matches!(
        kind,
        InequalityKind::Hardy
            | InequalityKind::HardyRemainder
            | InequalityKind::WeightedHardy
            | InequalityKind::EigenHardy
            | InequalityKind::Caccioppoli
            | InequalityKind::DivergenceLemma
            | InequalityKind::PoincareEigen
    )
}

/// Runs one case: hypothesis first, then the inequality over seeded test
/// functions, then the optional minimisation and convergence study.
pub fn run_case(
    spec: &CaseSpec,
    seed: u64,
    n_tests: usize,
    tol: f64,
    default_n: usize,
) -> Result<CaseRecord> {
    let Resolved { case, grid } = resolve_case(spec, default_n)?;
    let seed = case_seed(seed, &spec.id);
    let n_tests = spec.n_tests.unwrap_or(n_tests);
    let mut record = CaseRecord {
        case_id: spec.id.clone(),
        kind: spec.kind,
        model: spec.model,
        weight: spec.weight.clone(),
        params: case.params.clone(),
        constant: case.constant,
        grid: GridInfo::of(&grid),
        seed,
        hypothesis: hypothesis(&case, &grid),
        status: Status::Pass,
        n_tests,
        min_margin: None,
        min_relative_margin: None,
        worst: None,
        remainder: None,
        minimization: None,
        convergence: None,
    };
    if record.hypothesis.as_ref().is_some_and(|h| !h.pass) {
        record.status = Status::HypothesisFailed;
        return Ok(record);
    }

    let tests = random_test_functions(&grid, n_tests, seed);
    let mut ok = true;
    let mut min_margin = f64::INFINITY;
    let mut min_rel = f64::INFINITY;
    let mut sides = Vec::with_capacity(tests.len());
    for u in &tests {
        let sp = evaluate_sides(&case, u)?;
        ok &= sp.holds(tol);
        min_margin = min_margin.min(sp.margin);
        if sp.relative_margin() < min_rel {
            min_rel = sp.relative_margin();
            record.worst = Some(sp);
        }
        sides.push(sp);
    }
    if !tests.is_empty() {
        record.min_margin = Some(min_margin);
        record.min_relative_margin = Some(min_rel);
    }

    if case.kind == InequalityKind::HardyRemainder {
        let lambda = estimate_lambda1(&case.model, &case.weight, case.range, case.n)?;
        let mut min_ratio = f64::INFINITY;
        for (u, sp) in tests.iter().zip(&sides) {
            let mass = l2_mass(&case.model, u)?;
            if mass > 0.0 && lambda > 0.0 {
                min_ratio = min_ratio.min(sp.margin / (lambda * mass));
            }
        }
        let pass = lambda > 0.0 && min_ratio >= 1.0 - TOL_REMAINDER;
        ok &= pass;
        record.remainder = Some(RemainderRecord {
            lambda1_hat: lambda,
            min_ratio,
            pass,
        });
    }

    if spec.minimize {
        if !single_quotient(case.kind) {
            return Err(Error::Config(format!(
                "{} is not a single Rayleigh quotient",
                case.kind
            )));
        }
        let r = minimize_quotient(&case)?;
        let above = r.quotient >= case.constant - tol;
        ok &= above;
        record.minimization = Some(MinimizationRecord {
            quotient: r.quotient,
            iterations: r.iterations,
            converged: r.converged,
            above_constant: above,
        });
    }

    if let Some(levels) = spec.study_levels {
        let study = convergence_study(&case, levels)?;
        let gaps_positive = study.levels.iter().all(|l| l.gap > 0.0);
        ok &= study.monotone && gaps_positive;
        record.convergence = Some(StudyRecord {
            levels: study
                .levels
                .iter()
                .map(|l| LevelRecord {
                    lo: l.lo,
                    hi: l.hi,
                    n: l.n,
                    quotient: l.result.quotient,
                    gap: l.gap,
                    corrected: l.corrected,
                })
                .collect(),
            extrapolated: study.extrapolated,
            monotone: study.monotone,
            gaps_positive,
        });
    }

    record.status = if case.is_degenerate() {
        Status::Trivial
    } else {
        Status::from_bool(ok)
    };
    Ok(record)
}

fn run_eigen(spec: &EigenSpec) -> Result<EigenRecord> {
    let range = match spec.model {
        ModelManifold::Interval { a, b } => CoordinateRange::closed(a, b),
        m => return Err(Error::Config(format!("model {m} is not an interval"))),
    };
    let grid = Arc::new(build_grid(range, spec.n, Spacing::Linear)?);
    let pair = first_eigenpair(&spec.model, spec.p, &grid)?;
    let mut ok = pair.residual < pair.tolerance();
    if let Some(e) = spec.expect {
        let tol = spec.rel_tol.unwrap_or(1e-6);
        ok &= ((pair.lambda1 - e) / e).abs() <= tol;
    }
    Ok(EigenRecord {
        id: spec.id.clone(),
        model: spec.model,
        p: spec.p,
        n: spec.n,
        lambda1: pair.lambda1,
        residual: pair.residual,
        converged: pair.converged,
        expected: spec.expect,
        status: Status::from_bool(ok),
    })
}

fn run_capacity(spec: &CapacitySpec) -> Result<CapacityRecord> {
    let schedule = default_schedule(spec.a);
    let r = classify_parabolicity(&spec.model, spec.p, spec.a, &schedule)?;
    let ok = spec.expect.is_none_or(|e| e == r.classification);
    Ok(CapacityRecord {
        id: spec.id.clone(),
        model: spec.model,
        p: spec.p,
        a: spec.a,
        schedule: r.schedule,
        values: r.values,
        ratio: r.ratio,
        slope: r.slope,
        classification: r.classification,
        expected: spec.expect,
        status: Status::from_bool(ok),
    })
}

fn run_weight_check(spec: &WeightCheckSpec) -> Result<WeightRecord> {
    let spacing = spec
        .spacing
        .unwrap_or_else(|| default_spacing(&spec.model, &spec.range));
    let grid = Arc::new(build_grid(spec.range, spec.n, spacing)?);
    let mut params = spec.params.clone();
    let w = resolve_weight(&spec.weight, spec.model, &mut params, &grid)?;
    let classification = classify_weight(&w, &grid, HYPOTHESIS_BUMPS);
    Ok(WeightRecord {
        id: spec.id.clone(),
        model: spec.model,
        weight: spec.weight.clone(),
        classification,
        expected: spec.expect,
        status: Status::from_bool(classification == spec.expect),
    })
}

/// Runs every entry of `cfg` in parallel and assembles the report sorted by id.
pub fn run_config(cfg: &SuiteConfig, opts: &RunOptions) -> Result<VerificationReport> {
    let seed = opts.seed.unwrap_or(cfg.seed);
    let tol = opts.tol_disc.or(cfg.tol_disc).unwrap_or(TOL_DISC);
    let default_n = cfg.default_n.unwrap_or(2000);

    fn collect<S: Sync, R: Send>(
        specs: &[S],
        id: impl Fn(&S) -> &str + Sync,
        run: impl Fn(&S) -> Result<R> + Sync,
    ) -> Result<Vec<R>> {
        let mut indexed: Vec<(String, Result<R>)> = specs
            .par_iter()
            .map(|s| (id(s).to_string(), run(s)))
            .collect();
        indexed.sort_by(|a, b| a.0.cmp(&b.0));
        indexed
            .into_iter()
            .map(|(id, r)| {
                r.map_err(|e| match e {
                    Error::Case { .. } => e,
                    other => other.in_case(id),
                })
            })
            .collect()
    }

    let cases = collect(
        &cfg.cases,
        |s| &s.id,
        |s| run_case(s, seed, cfg.n_tests, tol, default_n),
    )?;
    let eigen = collect(&cfg.eigen, |s| &s.id, run_eigen)?;
    let capacity = collect(&cfg.capacity, |s| &s.id, run_capacity)?;
    let weights = collect(&cfg.weights, |s| &s.id, run_weight_check)?;
    let mut report = VerificationReport {
        suite: cfg.name.clone(),
        seed,
        tol_disc: tol,
        cases,
        eigen,
        capacity,
        weights,
        summary: Summary::default(),
    };
    report.summarize();
    Ok(report)
}

/// Loads the config at `path`, runs it and writes the JSON report and CSV
/// tables to the output directory (command line, then config, then the
/// config's directory).
pub fn run_suite(path: &Path, opts: &RunOptions) -> Result<(VerificationReport, PathBuf)> {
    let cfg = SuiteConfig::load(path)?;
    let report = run_config(&cfg, opts)?;
    let dir = opts
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| {
            path.parent()
                .map(Path::to_path_buf)
                .unwrap_or_default()
                .join("out")
        });
    emit_tables(&report, TableFormat::Json, &dir)?;
    emit_tables(&report, TableFormat::Csv, &dir)?;
    Ok((report, dir))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn csv_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    write_file(path, &bytes)
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Trivial => "trivial",
        Status::HypothesisFailed => "hypothesis-failed",
    }
}

/// Writes `report.json`, or one CSV table per record type, into `dir`.
pub fn emit_tables(
    report: &VerificationReport,
    format: TableFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        TableFormat::Json => {
            let path = dir.join("report.json");
            write_file(&path, report.to_json()?.as_bytes())?;
            Ok(vec![path])
        }
        TableFormat::Csv => {
            let cases = dir.join("cases.csv");
            csv_table(
                &cases,
                &[
                    "case_id",
                    "kind",
                    "model",
                    "weight",
                    "constant",
                    "n",
                    "lo",
                    "hi",
                    "spacing",
                    "seed",
                    "hypothesis_pass",
                    "hypothesis_worst",
                    "status",
                    "n_tests",
                    "min_margin",
                    "min_relative_margin",
                    "minimized_quotient",
                ],
                report
                    .cases
                    .iter()
                    .map(|c| {
                        vec![
                            c.case_id.clone(),
                            c.kind.to_string(),
                            c.model.to_string(),
                            c.weight.clone(),
                            fmt_float(c.constant),
                            c.grid.n.to_string(),
                            fmt_float(c.grid.lo),
                            fmt_float(c.grid.hi),
                            c.grid.spacing.to_string(),
                            c.seed.to_string(),
                            c.hypothesis
                                .as_ref()
                                .map(|h| h.pass.to_string())
                                .unwrap_or_default(),
                            opt(c.hypothesis.as_ref().map(|h| h.worst_value)),
                            status_name(c.status).to_string(),
                            c.n_tests.to_string(),
                            opt(c.min_margin),
                            opt(c.min_relative_margin),
                            opt(c.minimization.as_ref().map(|m| m.quotient)),
                        ]
                    })
                    .collect(),
            )?;
            let eigen = dir.join("eigen.csv");
            csv_table(
                &eigen,
                &[
                    "id",
                    "model",
                    "p",
                    "n",
                    "lambda1",
                    "residual",
                    "converged",
                    "expected",
                    "status",
                ],
                report
                    .eigen
                    .iter()
                    .map(|e| {
                        vec![
                            e.id.clone(),
                            e.model.to_string(),
                            fmt_float(e.p),
                            e.n.to_string(),
                            fmt_float(e.lambda1),
                            fmt_float(e.residual),
                            e.converged.to_string(),
                            opt(e.expected),
                            status_name(e.status).to_string(),
                        ]
                    })
                    .collect(),
            )?;
            let capacity = dir.join("capacity.csv");
            csv_table(
                &capacity,
                &[
                    "id",
                    "model",
                    "p",
                    "a",
                    "b",
                    "capacity",
                    "classification",
                    "status",
                ],
                report
                    .capacity
                    .iter()
                    .flat_map(|c| {
                        c.schedule.iter().zip(&c.values).map(move |(b, v)| {
                            vec![
                                c.id.clone(),
                                c.model.to_string(),
                                fmt_float(c.p),
                                fmt_float(c.a),
                                fmt_float(*b),
                                fmt_float(*v),
                                serde_json::to_value(c.classification)
                                    .ok()
                                    .and_then(|v| v.as_str().map(str::to_string))
                                    .unwrap_or_default(),
                                status_name(c.status).to_string(),
                            ]
                        })
                    })
                    .collect(),
            )?;
            let weights = dir.join("weights.csv");
            csv_table(
                &weights,
                &[
                    "id",
                    "model",
                    "weight",
                    "classification",
                    "expected",
                    "status",
                ],
                report
                    .weights
                    .iter()
                    .map(|w| {
                        vec![
                            w.id.clone(),
                            w.model.to_string(),
                            w.weight.clone(),
                            w.classification.to_string(),
                            w.expected.to_string(),
                            status_name(w.status).to_string(),
                        ]
                    })
                    .collect(),
            )?;
            Ok(vec![cases, eigen, capacity, weights])
        }
    }
}

/// Sorted text listing of models, weights and inequality kinds with the
/// formulas of their constants.
pub fn list_catalog() -> String {
    let models = [
        ("euclidean-radial", "density σ_{N−1} r^{N−1}, coordinate r"),
        ("half-plane-poincare", "density y^{−2}, coordinate y"),
        (
            "hyperbolic-radial",
            "density σ_{N−1} sinh^{N−1} r, coordinate r",
        ),
        ("interval", "density 1, coordinate x"),
    ];
    let weights = [
        ("constant", "c (parameter c)"),
        ("dist-boundary", "min(x − a, b − x) on an interval"),
        ("eigenfunction", "first Dirichlet eigenfunction φ1, sampled"),
        ("green", "radial Green profile ∫_t^R s^{−1/(p−1)}, sampled"),
        ("harmonic-power", "r^{(p−N)/(p−1)}"),
        ("height", "y on the half-plane"),
        ("log", "|ln t|"),
        ("power", "t^β (parameter beta)"),
        ("t-log-t", "−t ln t"),
    ];
    let mut kinds: Vec<(&str, &str)> = InequalityKind::ALL
        .iter()
        .map(|k| (k.name(), k.constant_formula()))
        .collect();
    kinds.sort();
    let mut out = String::new();
    for (title, rows) in [
        ("models", &models[..]),
        ("weights", &weights[..]),
        ("inequalities", &kinds[..]),
    ] {
        out.push_str(title);
        out.push('\n');
        let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
        for (name, desc) in rows {
            let pad = width - name.chars().count();
            out.push_str(&format!("  {name}{} | {desc}\n", " ".repeat(pad)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hardy_spec(id: &str, weight: &str) -> CaseSpec {
        CaseSpec {
            id: id.to_string(),
            kind: InequalityKind::Hardy,
            model: ModelManifold::EuclideanRadial { dim: 3 },
            weight: weight.to_string(),
            params: BTreeMap::new(),
            range: CoordinateRange::open(1e-2, 1e2),
            n: Some(800),
            spacing: None,
            field: None,
            n_tests: Some(20),
            minimize: true,
            study_levels: None,
        }
    }

    fn config(cases: Vec<CaseSpec>) -> SuiteConfig {
        SuiteConfig {
            name: "unit".into(),
            seed: 7,
            tol_disc: None,
            n_tests: 20,
            default_n: None,
            out_dir: None,
            cases,
            eigen: vec![],
            capacity: vec![],
            weights: vec![],
        }
    }

    #[test]
    fn catalog_lists_constants() {
        let text = list_catalog();
        assert!(text.contains("hardy") && text.contains("| constant ((p−1)/p)^p"));
        assert!(text.contains("weighted-hardy") && text.contains("| (|p−1−α|/p)^p"));
        assert_eq!(text, list_catalog());
    }

    #[test]
    fn superharmonic_weight_passes_and_subharmonic_is_excluded() {
        let cfg = config(vec![
            hardy_spec("b-sq", "power:beta=2"),
            hardy_spec("a-inv", "power:beta=-1"),
        ]);
        let r = run_config(&cfg, &RunOptions::default()).unwrap();
        assert_eq!(r.cases[0].case_id, "a-inv");
        assert_eq!(r.cases[0].status, Status::Pass);
        assert_eq!(r.cases[1].status, Status::HypothesisFailed);
        assert_eq!(r.summary.n_hypothesis_failed, 1);
        assert_eq!(r.summary.n_checks, 1);
        assert!(r.passed());
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let cfg = config(vec![hardy_spec("a", "power:beta=-1")]);
        let r = run_config(&cfg, &RunOptions::default()).unwrap();
        let text = r.to_json().unwrap();
        let back = VerificationReport::from_json(&text).unwrap();
        assert_eq!(back.to_json().unwrap(), text);
        assert!(text.contains("\"case_id\""));
    }

    #[test]
    fn empty_report_has_csv_headers() {
        let r = run_config(&config(vec![]), &RunOptions::default()).unwrap();
        assert_eq!(r.summary, Summary::default());
        let dir = tempfile::tempdir().unwrap();
        let files = emit_tables(&r, TableFormat::Csv, dir.path()).unwrap();
        let text = fs::read_to_string(&files[0]).unwrap();
        assert!(text.starts_with("case_id,kind,model"));
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn duplicate_ids_are_config_errors() {
        let cfg = config(vec![
            hardy_spec("a", "power:beta=-1"),
            hardy_spec("a", "log"),
        ]);
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(matches!(
            SuiteConfig::from_json(&text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unknown_weight_is_a_config_error() {
        let cfg = config(vec![hardy_spec("a", "nope")]);
        let e = run_config(&cfg, &RunOptions::default()).unwrap_err();
        assert!(e.is_config(), "{e}");
    }

    #[test]
    fn floats_keep_full_precision() {
        let x = 0.1f64 + 0.2;
        let s = to_canonical_json(&x).unwrap();
        assert_eq!(s.trim().parse::<f64>().unwrap(), x);
    }
}
