//! Weight functions `rho` with closed-form derivatives, the weak-form
//! p-superharmonicity checker, and radial vector fields for the divergence
//! lemma.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::capacity::{self, Parabolicity};
use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, ModelManifold};
use crate::grids::{interpolate_linear, GridFunction, RadialGrid};

/// Relative tolerance of the weak-form checker.
pub const TOL_WEAK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// `rho = t^beta` in the reduction coordinate.
    Power {
        beta: f64,
    },
    /// `rho = |ln t|`.
    LogAbs,
    /// `rho = -t ln t`.
    NegTLogT,
    /// `rho = min(t - a, b - t)` on an interval. Kinked at the midpoint.
    DistanceToBoundary,
    Constant {
        c: f64,
    },
    /// Radial Green profile `int_t^hi (s / sigma)^{-1/(p-1)}`, sampled.
    Green,
    /// First Dirichlet eigenfunction, sampled.
    Eigenfunction {
        lambda1: f64,
    },
    /// Arbitrary sampled profile.
    Sampled,
}

impl WeightFamily {
    pub fn label(&self) -> &'static str {
        match self {
            WeightFamily::Power { .. } => "power",
            WeightFamily::LogAbs => "log",
            WeightFamily::NegTLogT => "t-log-t",
            WeightFamily::DistanceToBoundary => "dist-boundary",
            WeightFamily::Constant { .. } => "constant",
            WeightFamily::Green => "green",
            WeightFamily::Eigenfunction { .. } => "eigenfunction",
            WeightFamily::Sampled => "sampled",
        }
    }
}

#[derive(Debug)]
struct Profile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// Node-wise coordinate derivative, if it is not supplied analytically.
    slopes: Option<Vec<f64>>,
}

/// A weight `rho` on a model, with its exponent parameters.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub name: String,
    pub family: WeightFamily,
    pub model: ModelManifold,
    pub p: f64,
    pub alpha: f64,
    scale: f64,
    profile: Option<Arc<Profile>>,
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {} (p = {})", self.name, self.model, self.p)
    }
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> Option<f64> {
    params.get(key).copied()
}

/// Splits `"power:beta=-1,p=2"` into the family name and its inline parameters.
pub fn parse_catalog_name(name: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let mut parts = name.splitn(2, ':');
    let family = parts.next().unwrap_or_default().trim().to_string();
    let mut params = BTreeMap::new();
    if let Some(rest) = parts.next() {
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("malformed weight parameter `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("non-numeric weight parameter `{kv}`")))?;
            params.insert(k.trim().to_string(), v);
        }
    }
    Ok((family, params))
}

/// Looks up an analytic catalog weight by name.
///
/// Recognised names: `power` (`beta`), `harmonic-power` (the p-harmonic
/// radial power `t^{(p-N)/(p-1)}`), `height` (`rho = y` on the half-plane),
/// `log` (`|ln t|`), `t-log-t` (`-t ln t`), `dist-boundary`, `constant` (`c`).
/// Sampled weights come from [`green_weight_radial`] and
/// [`WeightSpec::eigenfunction`].
pub fn rho_catalog_entry(
    name: &str,
    model: ModelManifold,
    params: &BTreeMap<String, f64>,
) -> Result<WeightSpec> {
    model.validate()?;
    let (family_name, inline) = parse_catalog_name(name)?;
    let mut all = params.clone();
    all.extend(inline);
    let p = param(&all, "p").unwrap_or(2.0);
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            family: family_name,
            reason: format!("p must exceed 1, got {p}"),
        });
    }
    let alpha = param(&all, "alpha").unwrap_or(0.0);
    let bad = |reason: String| Error::InvalidParameter {
        family: family_name.clone(),
        reason,
    };
    let family = match family_name.as_str() {
        "power" => {
            let beta = param(&all, "beta").ok_or_else(|| bad("missing beta".into()))?;
            if beta == 0.0 || !beta.is_finite() {
                return Err(bad(format!("beta must be finite and nonzero, got {beta}")));
            }
            WeightFamily::Power { beta }
        }
        "harmonic-power" => {
            if !model.is_radial() {
                return Err(bad("harmonic-power needs a radial model".into()));
            }
            let n = model.dim() as f64;
            if p == n {
                return Err(bad("harmonic-power needs p != N".into()));
            }
            WeightFamily::Power {
                beta: (p - n) / (p - 1.0),
            }
        }
        "height" => {
            if model != ModelManifold::HalfPlanePoincare {
                return Err(bad("height weight lives on the half-plane".into()));
            }
            WeightFamily::Power { beta: 1.0 }
        }
        "log" => {
            if model == ModelManifold::HalfPlanePoincare {
                return Err(bad("log weight needs a radial or interval model".into()));
            }
            WeightFamily::LogAbs
        }
        "t-log-t" | "r-log-r" => WeightFamily::NegTLogT,
        "dist-boundary" => {
            if !matches!(model, ModelManifold::Interval { .. }) {
                return Err(bad("dist-boundary needs an interval model".into()));
            }
            WeightFamily::DistanceToBoundary
        }
        "constant" => {
            let c = param(&all, "c").unwrap_or(1.0);
            if !(c > 0.0) {
                return Err(bad(format!("constant weight must be positive, got {c}")));
            }
            WeightFamily::Constant { c }
        }
        other => {
            return Err(Error::Config(format!("unknown weight `{other}`")));
        }
    };
    Ok(WeightSpec {
        name: name.to_string(),
        family,
        model,
        p,
        alpha,
        scale: 1.0,
        profile: None,
    })
}

impl WeightSpec {
    pub fn power(model: ModelManifold, p: f64, beta: f64) -> Result<WeightSpec> {
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), p);
        params.insert("beta".to_string(), beta);
        rho_catalog_entry("power", model, &params)
    }

    /// Wraps a positive sampled profile, e.g. a first eigenfunction.
    pub fn eigenfunction(
        model: ModelManifold,
        p: f64,
        lambda1: f64,
        phi: &GridFunction,
    ) -> WeightSpec {
        WeightSpec {
            name: "eigenfunction".to_string(),
            family: WeightFamily::Eigenfunction { lambda1 },
            model,
            p,
            alpha: 0.0,
            scale: 1.0,
            profile: Some(Arc::new(Profile {
                nodes: phi.grid().nodes().to_vec(),
                values: phi.values().to_vec(),
                slopes: Some(phi.derivative()),
            })),
        }
    }

    pub fn sampled(model: ModelManifold, p: f64, rho: &GridFunction) -> WeightSpec {
        WeightSpec {
            name: "sampled".to_string(),
            family: WeightFamily::Sampled,
            model,
            p,
            alpha: 0.0,
            scale: 1.0,
            profile: Some(Arc::new(Profile {
                nodes: rho.grid().nodes().to_vec(),
                values: rho.values().to_vec(),
                slopes: Some(rho.derivative()),
            })),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    /// The weight `lambda * rho`.
    pub fn scaled(&self, lambda: f64) -> WeightSpec {
        let mut w = self.clone();
        w.scale *= lambda;
        w
    }

    /// Whether a pointwise closed form of `Delta_p rho` is available.
    pub fn analytic_plap(&self) -> bool {
        !matches!(
            self.family,
            WeightFamily::DistanceToBoundary | WeightFamily::Sampled
        )
    }

    /// Whether the coordinate derivative is known in closed form (as opposed
    /// to differentiated from samples).
    pub fn analytic_slope(&self) -> bool {
        !matches!(
            self.family,
            WeightFamily::Eigenfunction { .. } | WeightFamily::Sampled
        )
    }

    fn unscaled_value(&self, t: f64) -> f64 {
        match self.family {
            WeightFamily::Power { beta } => t.powf(beta),
            WeightFamily::LogAbs => t.ln().abs(),
            WeightFamily::NegTLogT => -t * t.ln(),
            WeightFamily::DistanceToBoundary => match self.model {
                ModelManifold::Interval { a, b } => (t - a).min(b - t),
                _ => f64::NAN,
            },
            WeightFamily::Constant { c } => c,
            WeightFamily::Green | WeightFamily::Eigenfunction { .. } | WeightFamily::Sampled => {
                let prof = self.profile.as_ref().expect("sampled weight has a profile");
                interpolate_linear(&prof.nodes, &prof.values, t, false)
            }
        }
    }

    fn unscaled_slope(&self, t: f64) -> f64 {
        match self.family {
            WeightFamily::Power { beta } => beta * t.powf(beta - 1.0),
            WeightFamily::LogAbs => t.ln().signum() / t,
            WeightFamily::NegTLogT => -(t.ln() + 1.0),
            WeightFamily::DistanceToBoundary => match self.model {
                ModelManifold::Interval { a, b } => {
                    if t - a < b - t {
                        1.0
                    } else if t - a > b - t {
                        -1.0
                    } else {
                        0.0
                    }
                }
                _ => f64::NAN,
            },
            WeightFamily::Constant { .. } => 0.0,
            WeightFamily::Green => -green_flux_density(&self.model, self.p, t),
            WeightFamily::Eigenfunction { .. } | WeightFamily::Sampled => {
                let prof = self.profile.as_ref().expect("sampled weight has a profile");
                let slopes = prof.slopes.as_ref().expect("sampled weight has slopes");
                interpolate_linear(&prof.nodes, slopes, t, false)
            }
        }
    }

    fn unscaled_second(&self, t: f64) -> Option<f64> {
        match self.family {
            WeightFamily::Power { beta } => Some(beta * (beta - 1.0) * t.powf(beta - 2.0)),
            WeightFamily::LogAbs => Some(-t.ln().signum() / (t * t)),
            WeightFamily::NegTLogT => Some(-1.0 / t),
            WeightFamily::Constant { .. } => Some(0.0),
            _ => None,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.scale * self.unscaled_value(t)
    }

    /// Signed coordinate derivative `d rho / dt`.
    pub fn slope(&self, t: f64) -> f64 {
        self.scale * self.unscaled_slope(t)
    }

    /// Riemannian gradient norm `|grad rho|`.
    pub fn grad_norm(&self, t: f64) -> f64 {
        self.slope(t).abs() * self.model.gradient_factor_unchecked(t)
    }

    /// Pointwise `Delta_p rho`, where a closed form exists.
    pub fn p_laplacian(&self, t: f64) -> Option<f64> {
        let p = self.p;
        match self.family {
            WeightFamily::Green => Some(0.0),
            WeightFamily::Eigenfunction { lambda1 } => {
                let phi = self.value(t);
                Some(-lambda1 * phi.abs().powf(p - 2.0) * phi)
            }
            _ => {
                let d1 = self.slope(t);
                let d2 = self.scale * self.unscaled_second(t)?;
                // Delta_p rho = g^p [ F' + F (s'/s + p g'/g) ],  F = |rho'|^{p-2} rho'
                let g = self.model.gradient_factor_unchecked(t);
                let flux = d1.signum() * d1.abs().powf(p - 1.0);
                let dflux = if d1 == 0.0 {
                    if p == 2.0 {
                        d2
                    } else {
                        0.0
                    }
                } else {
                    (p - 1.0) * d1.abs().powf(p - 2.0) * d2
                };
                let lg = self.model.density_log_derivative(t)
                    + p * self.model.gradient_factor_log_derivative(t);
                Some(g.powf(p) * (dflux + flux * lg))
            }
        }
    }

    /// Node-wise values on a grid.
    pub fn sample(&self, grid: &RadialGrid) -> Vec<f64> {
        grid.nodes().iter().map(|&t| self.value(t)).collect()
    }

    /// Weighted flux `s g^p |rho'|^{p-2} rho'` at the cell midpoints of a grid:
    /// analytic slopes when available, cell differences of the samples otherwise.
    pub(crate) fn cell_flux(&self, grid: &RadialGrid) -> Vec<f64> {
        let p = self.p;
        let mids = grid.cell_midpoints();
        if self.analytic_slope() {
            mids.iter()
                .map(|&m| {
                    let d = self.slope(m);
                    flux_coefficient(&self.model, p, m) * d.signum() * d.abs().powf(p - 1.0)
                })
                .collect()
        } else {
            let vals = self.sample(grid);
            let h = grid.cell_widths();
            mids.iter()
                .enumerate()
                .map(|(i, &m)| {
                    let d = (vals[i + 1] - vals[i]) / h[i];
                    flux_coefficient(&self.model, p, m) * d.signum() * d.abs().powf(p - 1.0)
                })
                .collect()
        }
    }
}

/// `s(t) g(t)^p`: the factor multiplying `|u'|^p` in the reduced p-energy.
pub(crate) fn flux_coefficient(model: &ModelManifold, p: f64, t: f64) -> f64 {
    model.density_unchecked(t) * model.gradient_factor_unchecked(t).powf(p)
}

/// `(s(t) / sigma_{N-1})^{-1/(p-1)}`: magnitude of the radial Green profile slope.
fn green_flux_density(model: &ModelManifold, p: f64, t: f64) -> f64 {
    let sigma = unit_sphere_area(model.dim() - 1);
    (model.density_unchecked(t) / sigma).powf(-1.0 / (p - 1.0))
}

/// Outcome of the weak-form sign test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakCheck {
    pub pass: bool,
    /// Minimum over test bumps of the normalised functional.
    pub worst_value: f64,
    pub n_bumps: usize,
}

/// Cubic B-spline bumps in the grid index coordinate for the two widths (3
/// and 9 cells), with at least `n_tests` centres each and enough to cover every
/// cell. Returns node values restricted to the support as `(first_index, values)`.
pub(crate) fn bump_family(n_nodes: usize, n_tests: usize) -> Vec<(usize, Vec<f64>)> {
    let mut bumps = Vec::with_capacity(2 * n_tests);
    for &width in &[3.0f64, 9.0] {
        let half = 0.5 * width;
        let lo = half;
        let hi = (n_nodes - 1) as f64 - half;
        if hi <= lo {
            continue;
        }
        // at least enough centres that neighbouring supports overlap
        let count = n_tests.max(((hi - lo) / half).ceil() as usize + 1);
        for k in 0..count {
            let c = if count == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (count - 1) as f64
            };
            let first = (c - half).floor().max(0.0) as usize;
            let last = ((c + half).ceil() as usize).min(n_nodes - 1);
            let vals: Vec<f64> = (first..=last)
                .map(|i| cubic_bspline(2.0 * (i as f64 - c) / half))
                .collect();
            bumps.push((first, vals));
        }
    }
    bumps
}

fn cubic_bspline(z: f64) -> f64 {
    let a = z.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    }
}

fn weak_check_from_flux(flux: &[f64], n_nodes: usize, n_tests: usize, sign: f64) -> WeakCheck {
    let mut worst = f64::INFINITY;
    let bumps = bump_family(n_nodes, n_tests.max(1));
    for (first, vals) in &bumps {
        let mut acc = 0.0;
        let mut mag = 0.0;
        // cells first-1 .. first+len-1 see the bump increments
        let start = first.saturating_sub(1);
        let end = (first + vals.len()).min(n_nodes - 1);
        for cell in start..end {
            let left = if cell >= *first {
                vals[cell - first]
            } else {
                0.0
            };
            let right = if cell + 1 >= *first && cell + 1 < first + vals.len() {
                vals[cell + 1 - first]
            } else {
                0.0
            };
            let dphi = right - left;
            acc += flux[cell] * dphi;
            mag += (flux[cell] * dphi).abs();
        }
        let value = if mag > 0.0 { sign * acc / mag } else { 0.0 };
        worst = worst.min(value);
    }
    if bumps.is_empty() {
        worst = 0.0;
    }
    WeakCheck {
        pass: worst >= -TOL_WEAK,
        worst_value: worst,
        n_bumps: bumps.len(),
    }
}

/// Weak-form sign test of `sign * int |grad rho|^{p-2} grad rho . grad phi dv`
/// over nonnegative bumps `phi`. With `sign = +1` a pass certifies
/// `-Delta_p rho >= 0` (p-superharmonic); with `sign = -1`, `Delta_p rho >= 0`.
///
/// Each value is normalised by `int |flux| |phi'|` so that the tolerance is
/// relative to the size of the integrand.
pub fn weak_superharmonicity_check(
    w: &WeightSpec,
    grid: &RadialGrid,
    n_tests: usize,
    sign: f64,
) -> WeakCheck {
    let flux = w.cell_flux(grid);
    weak_check_from_flux(&flux, grid.len(), n_tests, sign.signum())
}

/// Same test for a raw sampled `rho`, differentiated cell by cell.
pub fn weak_superharmonicity_check_sampled(
    rho: &GridFunction,
    model: &ModelManifold,
    p: f64,
    n_tests: usize,
    sign: f64,
) -> WeakCheck {
    let grid = rho.grid();
    let h = grid.cell_widths();
    let vals = rho.values();
    let flux: Vec<f64> = grid
        .cell_midpoints()
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let d = (vals[i + 1] - vals[i]) / h[i];
            flux_coefficient(model, p, m) * d.signum() * d.abs().powf(p - 1.0)
        })
        .collect();
    weak_check_from_flux(&flux, grid.len(), n_tests, sign.signum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Harmonicity {
    Harmonic,
    Superharmonic,
    Subharmonic,
    Indefinite,
}

impl fmt::Display for Harmonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Harmonicity::Harmonic => "harmonic",
            Harmonicity::Superharmonic => "superharmonic",
            Harmonicity::Subharmonic => "subharmonic",
            Harmonicity::Indefinite => "indefinite",
        };
        f.write_str(s)
    }
}

/// Runs the weak check with both signs.
pub fn classify_weight(w: &WeightSpec, grid: &RadialGrid, n_tests: usize) -> Harmonicity {
    let sup = weak_superharmonicity_check(w, grid, n_tests, 1.0).pass;
    let sub = weak_superharmonicity_check(w, grid, n_tests, -1.0).pass;
    match (sup, sub) {
        (true, true) => Harmonicity::Harmonic,
        (true, false) => Harmonicity::Superharmonic,
        (false, true) => Harmonicity::Subharmonic,
        (false, false) => Harmonicity::Indefinite,
    }
}

/// Relative mismatch of `int |grad rho^gamma|^p` against
/// `|gamma|^p int rho^{p(gamma-1)} |grad rho|^p`, both by quadrature.
pub fn chain_rule_identity_check(rho: &WeightSpec, gamma: f64, grid: &RadialGrid) -> Result<f64> {
    let p = rho.p;
    let model = rho.model;
    let nodes = grid.nodes();
    let powered: Vec<f64> = nodes.iter().map(|&t| rho.value(t).powf(gamma)).collect();
    let d = grid.derivative(&powered);
    let lhs_vals: Vec<f64> = nodes
        .iter()
        .zip(&d)
        .map(|(&t, &dv)| flux_coefficient(&model, p, t) * dv.abs().powf(p))
        .collect();
    let rhs_vals: Vec<f64> = nodes
        .iter()
        .map(|&t| {
            let r = rho.value(t);
            model.density_unchecked(t) * r.powf(p * (gamma - 1.0)) * rho.grad_norm(t).powf(p)
        })
        .collect();
    let lhs = grid.integrate(&lhs_vals)?;
    let denom = gamma.abs().powf(p) * grid.integrate(&rhs_vals)?;
    if denom.abs() < 1e-300 {
        // derivative of a constant is only zero up to round-off
        let scale = powered.iter().fold(0.0f64, |a, &b| a.max(b.abs())) / (grid.hi() - grid.lo());
        let dmax = d.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if dmax <= 1e-10 * scale {
            return Ok(0.0);
        }
        return Err(Error::ZeroDenominator("chain_rule_identity_check"));
    }
    Ok((lhs - denom).abs() / denom.abs())
}

/// Radial Green profile `rho(t) = int_t^hi (s / sigma)^{-1/(p-1)}` on the
/// grid, with analytic slope and `Delta_p rho = 0`. Rejects p-parabolic models.
pub fn green_weight_radial(model: ModelManifold, p: f64, grid: &RadialGrid) -> Result<WeightSpec> {
    if !model.is_radial() {
        return Err(Error::UnsupportedModel {
            model: model.to_string(),
            op: "green_weight_radial",
        });
    }
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    if grid.lo() <= 0.0 {
        return Err(Error::invalid("green profile needs grid lo > 0"));
    }
    let verdict = capacity::classify_parabolicity(
        &model,
        p,
        grid.lo(),
        &capacity::default_schedule(grid.lo()),
    )?;
    if !matches!(verdict.classification, Parabolicity::PHyperbolic) {
        return Err(Error::ParabolicModel {
            model: model.to_string(),
            p,
        });
    }
    let nodes = grid.nodes();
    let n = nodes.len();
    let f = |t: f64| green_flux_density(&model, p, t);
    let mut values = vec![0.0; n];
    for i in (0..n - 1).rev() {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let m = 0.5 * (a + b);
        let cell = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        values[i] = values[i + 1] + cell;
    }
    Ok(WeightSpec {
        name: "green".to_string(),
        family: WeightFamily::Green,
        model,
        p,
        alpha: 0.0,
        scale: 1.0,
        profile: Some(Arc::new(Profile {
            nodes: nodes.to_vec(),
            values,
            slopes: None,
        })),
    })
}

/// A radial vector field `h` (signed component along the coordinate) and a
/// candidate lower bound `A_h` for its divergence.
#[derive(Clone)]
pub struct VectorFieldCase {
    pub name: String,
    pub model: ModelManifold,
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    a_h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for VectorFieldCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFieldCase")
            .field("name", &self.name)
            .field("model", &self.model)
            .finish()
    }
}

impl VectorFieldCase {
    pub fn new(
        name: impl Into<String>,
        model: ModelManifold,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a_h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        VectorFieldCase {
            name: name.into(),
            model,
            h: Arc::new(h),
            a_h: Arc::new(a_h),
        }
    }

    /// `h = x / |x|^p` from the conformal Killing field `K = x` on `R^N`,
    /// with `A_h = Div h = (N - p) / |x|^p`.
    pub fn killing(dim: u32, p: f64) -> Result<Self> {
        let n = dim as f64;
        if !(p < n) {
            return Err(Error::invalid(format!(
                "Killing-field case needs p < N, got p = {p}, N = {dim}"
            )));
        }
        Ok(VectorFieldCase::new(
            "killing",
            ModelManifold::EuclideanRadial { dim },
            move |r| r.powf(1.0 - p),
            move |r| (n - p) * r.powf(-p),
        ))
    }

    /// `h = grad V`, `A_h = Delta V` for `V = r^2`.
    pub fn davies_hinz(model: ModelManifold) -> Result<Self> {
        if !matches!(model, ModelManifold::EuclideanRadial { .. }) {
            return Err(Error::UnsupportedModel {
                model: model.to_string(),
                op: "davies_hinz",
            });
        }
        let n = model.dim() as f64;
        Ok(VectorFieldCase::new(
            "davies-hinz",
            model,
            |r| 2.0 * r,
            move |_| 2.0 * n,
        ))
    }

    pub fn h(&self, t: f64) -> f64 {
        (self.h)(t)
    }

    pub fn a_h(&self, t: f64) -> f64 {
        (self.a_h)(t)
    }

    /// Minimum over interior nodes of `(Div h - A_h) / |A_h|`, with the
    /// divergence `(1/s)(s g h)'` differentiated numerically.
    pub fn divergence_margin(&self, grid: &RadialGrid) -> f64 {
        let nodes = grid.nodes();
        let flux: Vec<f64> = nodes
            .iter()
            .map(|&t| {
                self.model.density_unchecked(t)
                    * self.model.gradient_factor_unchecked(t)
                    * self.h(t)
            })
            .collect();
        let d = grid.derivative(&flux);
        (1..nodes.len() - 1)
            .map(|i| {
                let t = nodes[i];
                let g = self.model.gradient_factor_unchecked(t);
                let div = g * d[i] / self.model.density_unchecked(t);
                let a = self.a_h(t);
                (div - a) / a.abs().max(1e-300)
            })
            .fold(f64::INFINITY, f64::min)
    }
}
