//! Minimisation of discrete Rayleigh quotients.
//!
//! For `p = 2` the quotient is a generalized symmetric tridiagonal eigenvalue
//! problem solved by inverse power iteration. For other `p` a preconditioned
//! descent is used whose full step is the nonlinear inverse iteration
//! `u <- Q A(u)^{-1} B(u) u`; Armijo backtracking keeps the quotient history
//! monotone.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functionals::{hardy_gap, InequalityCase, InequalityKind, QuotientForms};
use crate::geometry::ModelManifold;
use crate::grids::{build_grid, CoordinateRange, GridFunction, RadialGrid, Spacing};
use crate::weights::{WeightFamily, WeightSpec};

#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub quotient: f64,
    pub minimizer: GridFunction,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<(usize, f64)>,
}

/// Which ends of the grid carry a homogeneous Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundary {
    pub dirichlet_lo: bool,
    pub dirichlet_hi: bool,
}

impl Boundary {
    pub const DIRICHLET: Boundary = Boundary {
        dirichlet_lo: true,
        dirichlet_hi: true,
    };

    fn free_range(&self, n: usize) -> (usize, usize) {
        let first = usize::from(self.dirichlet_lo);
        let last = if self.dirichlet_hi { n - 2 } else { n - 1 };
        (first, last)
    }
}

/// Symmetric tridiagonal matrix assembled from per-cell coefficients.
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiag {
    /// Matrix of `Σ c_i (u_{i+1} - u_i)^2` restricted to unknowns `first..=last`.
    fn from_cells(cells: &[f64], first: usize, last: usize) -> Self {
        let m = last - first + 1;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for (j, d) in diag.iter_mut().enumerate() {
            let node = first + j;
            if node > 0 {
                *d += cells[node - 1];
            }
            if node < cells.len() {
                *d += cells[node];
            }
        }
        for (j, o) in off.iter_mut().enumerate() {
            *o = -cells[first + j];
        }
        Tridiag { diag, off }
    }

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.diag.len();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        // pivots are compared with their own row, since cell coefficients of
        // power weights on wide ranges span many orders of magnitude
        let mut piv = self.diag[0];
        if !(piv.abs() > 1e-14 * self.diag[0].abs()) || piv == 0.0 || !piv.is_finite() {
            return Err(Error::Singular(format!("zero pivot at row 0 ({piv})")));
        }
        if m > 1 {
            c[0] = self.off[0] / piv;
        }
        d[0] = rhs[0] / piv;
        for i in 1..m {
            piv = self.diag[i] - self.off[i - 1] * c[i - 1];
            if !(piv.abs() > 1e-14 * self.diag[i].abs()) || !piv.is_finite() {
                return Err(Error::Singular(format!("zero pivot at row {i} ({piv})")));
            }
            if i < m - 1 {
                c[i] = self.off[i] / piv;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        for i in (0..m - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

fn embed(
    grid: &Arc<RadialGrid>,
    x: &[f64],
    first: usize,
    boundary: Boundary,
) -> Result<GridFunction> {
    let n = grid.len();
    let mut v = vec![0.0; n];
    v[first..first + x.len()].copy_from_slice(x);
    let peak = v
        .iter()
        .fold(0.0f64, |a, &b| if b.abs() > a.abs() { b } else { a });
    if peak != 0.0 {
        for y in v.iter_mut() {
            *y /= peak;
        }
    }
    GridFunction::new(grid.clone(), v, boundary == Boundary::DIRICHLET)
}

fn check_mass(forms: &QuotientForms, first: usize, last: usize) -> Result<()> {
    for i in first..=last {
        if !forms.mass[i].is_finite() {
            return Err(Error::NonFinite {
                index: i,
                t: forms.grid.nodes()[i],
            });
        }
    }
    Ok(())
}

/// Smallest generalized eigenpair of the `p = 2` forms by inverse iteration.
pub fn minimize_forms_p2(forms: &QuotientForms, boundary: Boundary) -> Result<MinimizationResult> {
    let off = vec![0.0; forms.stiff.len()];
    inverse_iteration(forms, &forms.mass, &off, boundary)
}

/// Inverse iteration for `K x = mu M x` with `K` from the forms' cells and a
/// tridiagonal mass matrix given by its diagonal and per-cell off-diagonal.
pub(crate) fn inverse_iteration(
    forms: &QuotientForms,
    mass_diag: &[f64],
    mass_off: &[f64],
    boundary: Boundary,
) -> Result<MinimizationResult> {
    if forms.p != 2.0 {
        return Err(Error::invalid(format!(
            "p = 2 solver called with p = {}",
            forms.p
        )));
    }
    let n = forms.grid.len();
    let (first, last) = boundary.free_range(n);
    check_mass(forms, first, last)?;
    let k = Tridiag::from_cells(&forms.stiff, first, last);
    let diag = &mass_diag[first..=last];
    let off = &mass_off[first..last];
    let m = diag.len();
    let apply_mass = |x: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|j| {
                let mut v = diag[j] * x[j];
                if j > 0 {
                    v += off[j - 1] * x[j - 1];
                }
                if j + 1 < m {
                    v += off[j] * x[j + 1];
                }
                v
            })
            .collect()
    };
    // cell-wise energy avoids the cancellation of the assembled form
    let quad = |x: &[f64]| -> (f64, f64) {
        let at = |i: usize| {
            if i < first || i > last {
                0.0
            } else {
                x[i - first]
            }
        };
        let num: f64 = forms
            .stiff
            .iter()
            .enumerate()
            .map(|(c, &kc)| kc * (at(c + 1) - at(c)).powi(2))
            .sum();
        let den: f64 = x.iter().zip(apply_mass(x)).map(|(a, b)| a * b).sum();
        (num, den)
    };
    let mut x = vec![1.0; m];
    let (num, den) = quad(&x);
    let mut mu = num / den;
    let mut history = vec![(0, mu)];
    let mut converged = false;
    let mut it = 0;
    while it < 10_000 {
        it += 1;
        let y = k.solve(&apply_mass(&x))?;
        let norm = y.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Singular("inverse iteration collapsed".into()));
        }
        x = y.iter().map(|v| v / norm).collect();
        let (num, den) = quad(&x);
        let next = num / den;
        history.push((it, next));
        let change = (next - mu).abs() / next.abs().max(1e-300);
        mu = next;
        if change < 1e-12 {
            converged = true;
            break;
        }
    }
    Ok(MinimizationResult {
        quotient: mu,
        minimizer: embed(&forms.grid, &x, first, boundary)?,
        iterations: it,
        converged,
        history,
    })
}

/// Options of the general-p descent.
#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_iter: usize,
    /// Stop when the quotient changes by less than `rel_tol` over `window` iterations.
    pub window: usize,
    pub rel_tol: f64,
    /// Replace iterates by their absolute value after each step.
    pub positive: bool,
    pub boundary: Boundary,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iter: 100_000,
            window: 50,
            rel_tol: 1e-8,
            positive: false,
            boundary: Boundary::DIRICHLET,
        }
    }
}

/// `A(u)` cell coefficients `k_i max(|Δu_i|, floor)^{p-2}` and `B(u)` nodal
/// weights `m_i max(|u_i|, floor)^{p-2}`.
fn linearize(forms: &QuotientForms, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = forms.p;
    let du: Vec<f64> = u.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let dmax = du.iter().fold(0.0f64, |a, &b| a.max(b));
    let umax = u.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let a = forms
        .stiff
        .iter()
        .zip(&du)
        .map(|(&k, &d)| k * d.max(1e-8 * dmax).max(1e-300).powf(p - 2.0))
        .collect();
    let b = forms
        .mass
        .iter()
        .zip(u)
        .map(|(&m, &v)| m * v.abs().max(1e-8 * umax).max(1e-300).powf(p - 2.0))
        .collect();
    (a, b)
}

/// Descent on the discrete quotient from `u0`.
pub fn minimize_forms_general(
    forms: &QuotientForms,
    u0: &[f64],
    opts: DescentOptions,
) -> Result<MinimizationResult> {
    let n = forms.grid.len();
    let (first, last) = opts.boundary.free_range(n);
    check_mass(forms, first, last)?;
    let mut u = u0.to_vec();
    if opts.boundary.dirichlet_lo {
        u[0] = 0.0;
    }
    if opts.boundary.dirichlet_hi {
        u[n - 1] = 0.0;
    }
    if opts.positive {
        u.iter_mut().for_each(|v| *v = v.abs());
    }
    let normalize = |u: &mut Vec<f64>| -> Result<()> {
        let l = forms.lhs(u)?;
        if !(l > 0.0) {
            return Err(Error::ZeroDenominator("initial guess has zero lhs"));
        }
        let s = l.powf(-1.0 / forms.p);
        u.iter_mut().for_each(|v| *v *= s);
        Ok(())
    };
    normalize(&mut u)?;
    let mut q = forms.quotient(&u)?;
    let mut history = vec![(0, q)];
    let mut converged = false;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let (a, b) = linearize(forms, &u);
        let mat = Tridiag::from_cells(&a, first, last);
        let rhs: Vec<f64> = (first..=last).map(|i| b[i] * u[i]).collect();
        let y = mat.solve(&rhs)?;
        // d = Q A^{-1} B u - u on the free nodes
        let mut d = vec![0.0; n];
        for (j, i) in (first..=last).enumerate() {
            d[i] = q * y[j] - u[i];
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-12 {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(x, dx)| x + t * dx).collect();
            if opts.positive {
                trial.iter_mut().for_each(|v| *v = v.abs());
            }
            if let Ok(qt) = forms.quotient(&trial) {
                if qt < q {
                    accepted = Some((trial, qt));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((mut next, qn)) = accepted else {
            // no strict decrease left at round-off level
            converged = true;
            break;
        };
        normalize(&mut next)?;
        u = next;
        q = qn;
        history.push((it, q));
        if history.len() > opts.window {
            let old = history[history.len() - 1 - opts.window].1;
            if (old - q).abs() <= opts.rel_tol * q.abs() {
                converged = true;
                break;
            }
        }
    }
    let peak = u
        .iter()
        .fold(0.0f64, |a, &b| if b.abs() > a.abs() { b } else { a });
    let values: Vec<f64> = u.iter().map(|v| v / peak).collect();
    Ok(MinimizationResult {
        quotient: q,
        minimizer: GridFunction::new(
            forms.grid.clone(),
            values,
            opts.boundary == Boundary::DIRICHLET,
        )?,
        iterations: it,
        converged,
        history,
    })
}

/// Minimises the case's quotient for `p = 2` on the case's grid.
pub fn minimize_quotient_p2(case: &InequalityCase) -> Result<MinimizationResult> {
    if case.p() != 2.0 {
        return Err(Error::invalid(format!(
            "case {} has p = {}",
            case.id,
            case.p()
        )));
    }
    let grid = case.build_grid()?;
    minimize_forms_p2(&case.forms(&grid)?, Boundary::DIRICHLET)
}

/// `min(rho^{(p-1)/p}, cap)` times a sine cutoff in the grid coordinate.
pub fn default_initial_guess(
    case: &InequalityCase,
    grid: &Arc<RadialGrid>,
) -> Result<GridFunction> {
    let p = case.p();
    let nodes = grid.nodes();
    let mut raw: Vec<f64> = nodes
        .iter()
        .map(|&t| case.weight.value(t).abs().powf((p - 1.0) / p))
        .map(|v| if v.is_finite() { v } else { 0.0 })
        .collect();
    let mut sorted = raw.clone();
    sorted.sort_by(f64::total_cmp);
    let cap = sorted[sorted.len() / 2].max(1e-300);
    let x0 = grid.to_grid_coordinate(nodes[0]);
    let x1 = grid.to_grid_coordinate(nodes[nodes.len() - 1]);
    for (v, &t) in raw.iter_mut().zip(nodes) {
        let z = (grid.to_grid_coordinate(t) - x0) / (x1 - x0);
        *v = v.min(cap).max(1e-3 * cap) * (PI * z).sin().max(0.0);
    }
    let n = raw.len();
    raw[0] = 0.0;
    raw[n - 1] = 0.0;
    GridFunction::new(grid.clone(), raw, true)
}

/// General-p minimisation of the case's quotient. `u0` may live on another
/// grid, in which case it is interpolated (warm start from a coarser level).
pub fn minimize_quotient_general_p(
    case: &InequalityCase,
    u0: Option<&GridFunction>,
) -> Result<MinimizationResult> {
    minimize_quotient_general_p_with(case, u0, DescentOptions::default())
}

pub fn minimize_quotient_general_p_with(
    case: &InequalityCase,
    u0: Option<&GridFunction>,
    opts: DescentOptions,
) -> Result<MinimizationResult> {
    let grid = case.build_grid()?;
    let forms = case.forms(&grid)?;
    let start: Vec<f64> = match u0 {
        Some(f) if Arc::ptr_eq(f.grid(), &grid) || f.grid().nodes() == grid.nodes() => {
            f.values().to_vec()
        }
        Some(f) => grid.nodes().iter().map(|&t| f.interpolate(t)).collect(),
        None => default_initial_guess(case, &grid)?.values().to_vec(),
    };
    if start.iter().all(|&v| v == 0.0) {
        return Err(Error::invalid("initial guess is identically zero"));
    }
    minimize_forms_general(&forms, &start, opts)
}

/// Minimises with the method matching `p`.
pub fn minimize_quotient(case: &InequalityCase) -> Result<MinimizationResult> {
    if case.p() == 2.0 {
        minimize_quotient_p2(case)
    } else {
        minimize_quotient_general_p(case, None)
    }
}

/// For `p = 2` power weights on Euclidean radial models and the half-plane,
/// the substitution `u = t^{(1-m)/2} v(ln t)` turns the quotient on `(lo, hi)`
/// into `limit + (pi / ln(hi/lo))^2 / beta^2`. Returns `(limit, correction)`.
pub fn log_substitution_oracle(case: &InequalityCase) -> Option<(f64, f64)> {
    if case.p() != 2.0 {
        return None;
    }
    let beta = match case.weight.family {
        WeightFamily::Power { beta } => beta,
        _ => return None,
    };
    let alpha = match case.kind {
        InequalityKind::Hardy | InequalityKind::HardyRemainder => 0.0,
        InequalityKind::WeightedHardy => case.alpha(),
        _ => return None,
    };
    // gradient side int t^m u'^2, mass side beta^2 int t^{m-2} u^2
    let m = match case.model {
        ModelManifold::EuclideanRadial { dim } => beta * alpha + dim as f64 - 1.0,
        ModelManifold::HalfPlanePoincare => beta * alpha,
        _ => return None,
    };
    let (lo, hi) = (case.range.lo, case.range.hi);
    if !(lo > 0.0) {
        return None;
    }
    let b2 = beta * beta;
    let l = (hi / lo).ln();
    Some((((m - 1.0) / 2.0).powi(2) / b2, (PI / l).powi(2) / b2))
}

/// One level of a convergence study.
#[derive(Debug, Clone)]
pub struct StudyLevel {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub result: MinimizationResult,
    /// `I(minimizer)` at this level.
    pub gap: f64,
    /// Quotient with the oracle correction removed, when the oracle applies.
    pub corrected: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub levels: Vec<StudyLevel>,
    /// Oracle-corrected limit at the finest level.
    pub extrapolated: Option<f64>,
    pub monotone: bool,
}

/// How the levels of a study are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudySchedule {
    /// `(lo, hi) = (lo0 10^{-k}, hi0 10^{k})` on a logarithmic grid with a
    /// fixed number of cells per decade, so the spaces are nested.
    Widen {
        lo0: f64,
        hi0: f64,
        per_decade: usize,
    },
    /// Dyadic refinement of the case's grid.
    Refine,
}

impl StudySchedule {
    /// Widening from `(1e-2, 1e2)` for logarithmic cases, refinement otherwise.
    pub fn default_for(case: &InequalityCase) -> Self {
        if case.spacing == Spacing::Logarithmic {
            StudySchedule::Widen {
                lo0: 1e-2,
                hi0: 1e2,
                per_decade: 500,
            }
        } else {
            StudySchedule::Refine
        }
    }
}

/// Minimised quotients over `levels` nested levels.
pub fn convergence_study(case: &InequalityCase, levels: usize) -> Result<ConvergenceStudy> {
    convergence_study_with(case, levels, StudySchedule::default_for(case))
}

pub fn convergence_study_with(
    case: &InequalityCase,
    levels: usize,
    schedule: StudySchedule,
) -> Result<ConvergenceStudy> {
    if levels < 3 {
        return Err(Error::invalid(format!(
            "a study needs at least 3 levels, got {levels}"
        )));
    }
    let mut out = Vec::with_capacity(levels);
    let mut warm: Option<GridFunction> = None;
    let base_grid = case.build_grid()?;
    let mut grid = base_grid;
    for k in 0..levels {
        let level_case = match schedule {
            StudySchedule::Widen {
                lo0,
                hi0,
                per_decade,
            } => {
                let lo = lo0 * 10f64.powi(-(k as i32));
                let hi = hi0 * 10f64.powi(k as i32);
                let decades = (hi / lo).log10().round() as usize;
                let range = CoordinateRange {
                    lo,
                    hi,
                    open_lo: case.range.open_lo,
                    open_hi: case.range.open_hi,
                };
                case.clone()
                    .with_range(range)
                    .with_grid(per_decade * decades + 1, Spacing::Logarithmic)
            }
            StudySchedule::Refine => {
                if k > 0 {
                    grid = Arc::new(grid.refine());
                }
                case.clone().with_grid(grid.len(), case.spacing)
            }
        };
        let result = if level_case.p() == 2.0 {
            minimize_quotient_p2(&level_case)?
        } else {
            minimize_quotient_general_p(&level_case, warm.as_ref())?
        };
        let gap = hardy_gap(&level_case, &result.minimizer)?;
        let corrected = log_substitution_oracle(&level_case).map(|(_, c)| result.quotient - c);
        warm = Some(result.minimizer.clone());
        out.push(StudyLevel {
            lo: level_case.range.lo,
            hi: level_case.range.hi,
            n: level_case.n,
            result,
            gap,
            corrected,
        });
    }
    let monotone = out
        .windows(2)
        .all(|w| w[1].result.quotient <= w[0].result.quotient + 1e-12);
    let extrapolated = out.last().and_then(|l| l.corrected);
    Ok(ConvergenceStudy {
        levels: out,
        extrapolated,
        monotone,
    })
}

/// `Λ1 = inf int rho |grad u|^2 / int rho u^2` on `range`. An open lower
/// endpoint is an excised point of the domain, so functions are left free
/// there; closed endpoints carry Dirichlet conditions. The upper end is
/// always Dirichlet.
pub fn estimate_lambda1(
    model: &ModelManifold,
    rho: &WeightSpec,
    range: CoordinateRange,
    n: usize,
) -> Result<f64> {
    let spacing = if range.lo > 0.0 && !matches!(model, ModelManifold::Interval { .. }) {
        Spacing::Logarithmic
    } else {
        Spacing::Linear
    };
    let grid = Arc::new(build_grid(range, n, spacing)?);
    let forms = QuotientForms::build(&grid, model, 2.0, |t| rho.value(t), |t| rho.value(t));
    let boundary = Boundary {
        dirichlet_lo: !range.open_lo,
        dirichlet_hi: true,
    };
    let r = minimize_forms_p2(&forms, boundary)?;
    Ok(r.quotient.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::rho_catalog_entry;
    use std::collections::BTreeMap;

    fn poincare_case(n: usize) -> InequalityCase {
        let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
        let w = rho_catalog_entry("constant", iv, &BTreeMap::new()).unwrap();
        let mut pm = BTreeMap::new();
        pm.insert("lambda1".to_string(), PI * PI);
        InequalityCase::new(
            "poincare",
            InequalityKind::PoincareEigen,
            w,
            CoordinateRange::closed(0.0, 1.0),
            pm,
        )
        .unwrap()
        .with_grid(n, Spacing::Linear)
    }

    fn hardy_case(lo: f64, hi: f64, n: usize) -> InequalityCase {
        let w = WeightSpec::power(ModelManifold::EuclideanRadial { dim: 3 }, 2.0, -1.0).unwrap();
        InequalityCase::new(
            "hardy",
            InequalityKind::Hardy,
            w,
            CoordinateRange::open(lo, hi),
            BTreeMap::new(),
        )
        .unwrap()
        .with_grid(n, Spacing::Logarithmic)
    }

    #[test]
    fn poincare_eigenvalue() {
        let r = minimize_quotient_p2(&poincare_case(2000)).unwrap();
        assert!(r.converged);
        assert!((r.quotient - PI * PI).abs() < 1e-5, "{}", r.quotient);
        for w in r.history.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12);
        }
    }

    #[test]
    fn poincare_general_p_agrees_at_p2() {
        let c = poincare_case(500);
        let a = minimize_quotient_p2(&c).unwrap();
        let b = minimize_quotient_general_p(&c, None).unwrap();
        assert!(
            (a.quotient - b.quotient).abs() < 1e-6,
            "{} {}",
            a.quotient,
            b.quotient
        );
    }

    #[test]
    fn euclidean_hardy_matches_oracle() {
        let c = hardy_case(1e-2, 1e2, 2000);
        let r = minimize_quotient_p2(&c).unwrap();
        let (lim, corr) = log_substitution_oracle(&c).unwrap();
        assert_eq!(lim, 0.25);
        assert!(
            (r.quotient / (lim + corr) - 1.0).abs() < 1e-3,
            "{}",
            r.quotient
        );
    }

    #[test]
    fn warm_start_is_no_worse() {
        let w = WeightSpec::power(ModelManifold::EuclideanRadial { dim: 4 }, 3.0, -0.5).unwrap();
        let c = InequalityCase::new(
            "p3",
            InequalityKind::Hardy,
            w,
            CoordinateRange::open(1e-1, 1e1),
            BTreeMap::new(),
        )
        .unwrap()
        .with_grid(201, Spacing::Logarithmic);
        let coarse = minimize_quotient_general_p(&c, None).unwrap();
        let fine = c.clone().with_grid(401, Spacing::Logarithmic);
        let cold = minimize_quotient_general_p(&fine, None).unwrap();
        let warm = minimize_quotient_general_p(&fine, Some(&coarse.minimizer)).unwrap();
        assert!(
            warm.quotient <= cold.quotient + 1e-6 * cold.quotient,
            "{} {}",
            warm.quotient,
            cold.quotient
        );
        assert!(cold.quotient >= (2.0f64 / 3.0).powi(3) - 1e-6);
        for h in cold.history.windows(2) {
            assert!(h[1].1 < h[0].1);
        }
    }

    #[test]
    fn lambda1_of_constant_weight() {
        let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
        let w = rho_catalog_entry("constant", iv, &BTreeMap::new()).unwrap();
        let l = estimate_lambda1(&iv, &w, CoordinateRange::closed(0.0, 1.0), 2000).unwrap();
        assert!((l - PI * PI).abs() < 1e-5, "{l}");
        let l2 =
            estimate_lambda1(&iv, &w.scaled(5.0), CoordinateRange::closed(0.0, 1.0), 2000).unwrap();
        assert!((l / l2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_matrix_reported() {
        let t = Tridiag {
            diag: vec![0.0, 1.0],
            off: vec![0.0],
        };
        assert!(matches!(t.solve(&[1.0, 1.0]), Err(Error::Singular(_))));
    }
}
