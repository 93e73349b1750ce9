//! Both sides of every inequality in scope, evaluated by quadrature on a
//! grid, plus the Rayleigh quotients whose infima are the best constants.
//!
//! Zeroth-order terms use the nodal trapezoid rule. Gradient terms use one
//! difference quotient per cell with coefficients at the cell midpoint, so
//! that the discrete p-energy is exactly the form the optimizers minimise.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ModelManifold;
use crate::grids::{build_grid, CoordinateRange, GridFunction, RadialGrid, Spacing};
use crate::weights::{flux_coefficient, VectorFieldCase, WeightFamily, WeightSpec};

/// Default relative tolerance for margins.
pub const TOL_DISC: f64 = 1e-6;

/// Tolerance for the CKN parameter relations.
pub const TOL_RELATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Hardy,
    WeightedHardy,
    Caccioppoli,
    DivergenceLemma,
    GagliardoNirenberg,
    Uncertainty,
    HardySobolev,
    Ckn,
    HardyRemainder,
    EigenHardy,
    PoincareEigen,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 11] = [
        InequalityKind::Hardy,
        InequalityKind::WeightedHardy,
        InequalityKind::Caccioppoli,
        InequalityKind::DivergenceLemma,
        InequalityKind::GagliardoNirenberg,
        InequalityKind::Uncertainty,
        InequalityKind::HardySobolev,
        InequalityKind::Ckn,
        InequalityKind::HardyRemainder,
        InequalityKind::EigenHardy,
        InequalityKind::PoincareEigen,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityKind::Hardy => "hardy",
            InequalityKind::WeightedHardy => "weighted-hardy",
            InequalityKind::Caccioppoli => "caccioppoli",
            InequalityKind::DivergenceLemma => "divergence-lemma",
            InequalityKind::GagliardoNirenberg => "gagliardo-nirenberg",
            InequalityKind::Uncertainty => "uncertainty",
            InequalityKind::HardySobolev => "hardy-sobolev",
            InequalityKind::Ckn => "ckn",
            InequalityKind::HardyRemainder => "hardy-remainder",
            InequalityKind::EigenHardy => "eigen-hardy",
            InequalityKind::PoincareEigen => "poincare-eigen",
        }
    }

    /// Human-readable formula of the constant.
    pub fn constant_formula(&self) -> &'static str {
        match self {
            InequalityKind::Hardy => "constant ((p−1)/p)^p",
            InequalityKind::WeightedHardy => "(|p−1−α|/p)^p",
            InequalityKind::Caccioppoli => "((q+1)/p)^p",
            InequalityKind::DivergenceLemma => "p^p on the gradient side",
            InequalityKind::GagliardoNirenberg => "(p/(|α|(p−1)))^(p−1)",
            InequalityKind::Uncertainty => "(p/(|α|(p−1)))^(p/a)",
            InequalityKind::HardySobolev => "C2 = S·H^(1/p)/(|θ|+H^(1/p))",
            InequalityKind::Ckn => "C3 = C2^(p*(r−p)/(r(p*−p)))·H^(a/p − p*(r−p)/(pr(p*−p)))",
            InequalityKind::HardyRemainder => "((p−1)/p)^p plus Λ1 ∫u²",
            InequalityKind::EigenHardy => "((p−1−α)/p)^p with ρ = φ1",
            InequalityKind::PoincareEigen => "λ1 (p−1−s)^(p−1)/p^p",
        }
    }

    /// Which weak sign the weight must have: `+1` p-superharmonic, `-1`
    /// p-subharmonic, `0` no requirement.
    pub fn hypothesis_sign(&self, p: f64, alpha: f64) -> f64 {
        match self {
            InequalityKind::WeightedHardy | InequalityKind::EigenHardy => {
                (p - 1.0 - alpha).signum()
            }
            InequalityKind::Caccioppoli => -1.0,
            InequalityKind::DivergenceLemma | InequalityKind::PoincareEigen => 0.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown inequality kind `{s}`")))
    }
}

/// Measured sides of one inequality for one test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidePair {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    /// `rhs - constant * lhs`.
    pub margin: f64,
}

impl SidePair {
    pub fn new(lhs: f64, rhs: f64, constant: f64) -> Result<Self> {
        if !(lhs.is_finite() && rhs.is_finite()) {
            return Err(Error::NonFinite {
                index: 0,
                t: f64::NAN,
            });
        }
        Ok(SidePair {
            lhs,
            rhs,
            constant,
            margin: rhs - constant * lhs,
        })
    }

    /// Whether the margin is above `-tol * rhs`.
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol * self.rhs.abs()
    }

    /// Margin relative to the rhs (zero when both vanish).
    pub fn relative_margin(&self) -> f64 {
        if self.rhs > 0.0 {
            self.margin / self.rhs
        } else {
            self.margin
        }
    }
}

/// One inequality instance: kind, parameters, weight and evaluation range.
#[derive(Debug, Clone)]
pub struct InequalityCase {
    pub id: String,
    pub kind: InequalityKind,
    pub params: BTreeMap<String, f64>,
    pub constant: f64,
    pub weight: WeightSpec,
    pub model: ModelManifold,
    pub range: CoordinateRange,
    pub n: usize,
    pub spacing: Spacing,
    pub field: Option<VectorFieldCase>,
}

fn get(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::Config(format!("missing parameter `{key}`")))
}

fn relation(condition: &'static str, ok: bool, detail: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Relation { condition, detail })
    }
}

/// Exponent of `d` in `rho = d^alpha` for the GN and uncertainty cases.
fn distance_exponent(w: &WeightSpec) -> Result<f64> {
    match w.family {
        WeightFamily::Power { beta } if w.model != ModelManifold::HalfPlanePoincare => Ok(beta),
        _ => Err(Error::Hypothesis(format!(
            "{w}: needs rho = d^alpha with |grad d| = 1"
        ))),
    }
}

/// Hardy constant `H(alpha, p) = (|p - 1 - alpha| / p)^p`.
pub fn hardy_constant(p: f64, alpha: f64) -> f64 {
    ((p - 1.0 - alpha).abs() / p).powf(p)
}

/// `C2 = S H^{1/p} / (|theta| + H^{1/p})`.
pub fn hardy_sobolev_constant(s_p: f64, h: f64, theta: f64, p: f64) -> f64 {
    let hp = h.powf(1.0 / p);
    s_p * hp / (theta.abs() + hp)
}

/// `C3` from `C2` and `H`.
pub fn ckn_constant(c2: f64, h: f64, p: f64, pstar: f64, r: f64, a: f64) -> f64 {
    let e = pstar * (r - p) / (r * (pstar - p));
    c2.powf(e) * h.powf(a / p - e / p)
}

/// Checks the CKN relations among the exponents.
pub fn check_ckn_relations(params: &BTreeMap<String, f64>) -> Result<()> {
    let p = get(params, "p")?;
    let pstar = get(params, "pstar")?;
    let r = get(params, "r")?;
    let a = get(params, "a")?;
    let theta = get(params, "theta")?;
    let gamma = get(params, "gamma")?;
    let delta = get(params, "delta")?;
    let eps = get(params, "eps")?;
    let sigma = get(params, "sigma")?;
    relation("p* > p", pstar > p, format!("p* = {pstar}, p = {p}"))?;
    relation("r > 0", r > 0.0, format!("r = {r}"))?;
    relation("0 <= a <= 1", (0.0..=1.0).contains(&a), format!("a = {a}"))?;
    let lower = (1.0 - a) / p + a / pstar;
    relation(
        "condr",
        1.0 / p >= 1.0 / r - TOL_RELATION && 1.0 / r >= lower - TOL_RELATION,
        format!(
            "need 1/p >= 1/r >= (1-a)/p + a/p*, got {} >= {} >= {}",
            1.0 / p,
            1.0 / r,
            lower
        ),
    )?;
    let lhs1 = gamma + pstar * (r - p) / (r * (pstar - p));
    let rhs1 = (1.0 - theta) * a + delta * (1.0 - a);
    relation(
        "cond1",
        (lhs1 - rhs1).abs() <= TOL_RELATION * lhs1.abs().max(1.0),
        format!("gamma + p*(r-p)/(r(p*-p)) = {lhs1} but (1-theta)a + delta(1-a) = {rhs1}"),
    )?;
    let rhs2 = theta * a + sigma * (1.0 - a);
    relation(
        "cond2",
        (eps - rhs2).abs() <= TOL_RELATION * eps.abs().max(1.0),
        format!("eps = {eps} but theta a + sigma (1-a) = {rhs2}"),
    )
}

impl InequalityCase {
    /// Builds a case and evaluates its constant from the parameters. The
    /// weight's `p` and `alpha` are used unless overridden in `params`.
    pub fn new(
        id: impl Into<String>,
        kind: InequalityKind,
        weight: WeightSpec,
        range: CoordinateRange,
        params: BTreeMap<String, f64>,
    ) -> Result<Self> {
        range.validate()?;
        let mut params = params;
        let p = *params.entry("p".to_string()).or_insert(weight.p);
        let alpha = *params.entry("alpha".to_string()).or_insert(weight.alpha);
        if !(p > 1.0) {
            return Err(Error::invalid(format!("p must exceed 1, got {p}")));
        }
        let weight = weight.with_p(p).with_alpha(alpha);
        let model = weight.model;
        let constant = match kind {
            InequalityKind::Hardy | InequalityKind::HardyRemainder => hardy_constant(p, 0.0),
            InequalityKind::WeightedHardy => hardy_constant(p, alpha),
            InequalityKind::EigenHardy => {
                if !(alpha < p - 1.0) {
                    return Err(Error::invalid(format!(
                        "eigen Hardy needs alpha < p - 1, got {alpha}"
                    )));
                }
                hardy_constant(p, alpha)
            }
            InequalityKind::Caccioppoli => {
                let q = get(&params, "q")?;
                if !(q > -1.0) {
                    return Err(Error::invalid(format!("Caccioppoli needs q > -1, got {q}")));
                }
                ((q + 1.0) / p).powf(p)
            }
            InequalityKind::DivergenceLemma => 1.0,
            InequalityKind::GagliardoNirenberg => {
                let a = distance_exponent(&weight)?;
                let delta = get(&params, "delta")?;
                if !(delta > 0.0) {
                    return Err(Error::invalid(format!(
                        "delta must be positive, got {delta}"
                    )));
                }
                let s = p - 1.0 + delta / p;
                let given = *params.entry("s".to_string()).or_insert(s);
                relation(
                    "s = p - 1 + delta/p",
                    (given - s).abs() <= 1e-12 * s.abs().max(1.0),
                    format!("s = {given}, p - 1 + delta/p = {s}"),
                )?;
                (p / (a.abs() * (p - 1.0))).powf(p - 1.0)
            }
            InequalityKind::Uncertainty => {
                let al = distance_exponent(&weight)?;
                let s = get(&params, "s")?;
                let a = get(&params, "a")?;
                if !(s > 0.0 && a > 1.0) {
                    return Err(Error::invalid(format!(
                        "uncertainty needs s > 0, a > 1, got s = {s}, a = {a}"
                    )));
                }
                let e = (a * s - p) / (a - 1.0);
                relation("(as - p)/(a - 1) > 0", e > 0.0, format!("exponent {e}"))?;
                (p / (al.abs() * (p - 1.0))).powf(p / a)
            }
            InequalityKind::HardySobolev => {
                let s_p = get(&params, "S")?;
                let theta = get(&params, "theta")?;
                let pstar = get(&params, "pstar")?;
                if !(s_p > 0.0) {
                    return Err(Error::invalid("Sobolev constant S must be positive"));
                }
                if !(pstar > 0.0) {
                    return Err(Error::invalid("p* must be positive"));
                }
                let h = *params
                    .entry("H".to_string())
                    .or_insert(hardy_constant(p, p * theta));
                hardy_sobolev_constant(s_p, h, theta, p)
            }
            InequalityKind::Ckn => {
                check_ckn_relations(&params)?;
                let s_p = get(&params, "S")?;
                let theta = get(&params, "theta")?;
                let h = *params
                    .entry("H".to_string())
                    .or_insert(hardy_constant(p, p * theta));
                let c2 = hardy_sobolev_constant(s_p, h, theta, p);
                ckn_constant(
                    c2,
                    h,
                    p,
                    get(&params, "pstar")?,
                    get(&params, "r")?,
                    get(&params, "a")?,
                )
            }
            InequalityKind::PoincareEigen => {
                let lambda1 = get(&params, "lambda1")?;
                let s = *params.entry("s".to_string()).or_insert(0.0);
                if !(0.0..p - 1.0).contains(&s) {
                    return Err(Error::invalid(format!("need 0 <= s < p - 1, got {s}")));
                }
                lambda1 * (p - 1.0 - s).powf(p - 1.0) / p.powf(p)
            }
        };
        if !(constant >= 0.0 && constant.is_finite()) {
            return Err(Error::invalid(format!("constant evaluates to {constant}")));
        }
        let spacing = if range.lo > 0.0 && !matches!(model, ModelManifold::Interval { .. }) {
            Spacing::Logarithmic
        } else {
            Spacing::Linear
        };
        Ok(InequalityCase {
            id: id.into(),
            kind,
            params,
            constant,
            weight,
            model,
            range,
            n: 2000,
            spacing,
            field: None,
        })
    }

    pub fn with_grid(mut self, n: usize, spacing: Spacing) -> Self {
        self.n = n;
        self.spacing = spacing;
        self
    }

    pub fn with_range(mut self, range: CoordinateRange) -> Self {
        self.range = range;
        self
    }

    pub fn with_field(mut self, field: VectorFieldCase) -> Self {
        self.field = Some(field);
        self
    }

    pub fn p(&self) -> f64 {
        self.params["p"]
    }

    pub fn alpha(&self) -> f64 {
        self.params["alpha"]
    }

    pub fn param(&self, key: &str) -> Result<f64> {
        get(&self.params, key)
    }

    /// A zero constant makes the inequality trivially true.
    pub fn is_degenerate(&self) -> bool {
        self.constant == 0.0
    }

    pub fn build_grid(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(build_grid(self.range, self.n, self.spacing)?))
    }

    /// Nodal mass and per-cell stiffness for kinds that are a single
    /// Rayleigh quotient `int a |grad u|^p / int q |u|^p`.
    pub fn forms(&self, grid: &Arc<RadialGrid>) -> Result<QuotientForms> {
        let p = self.p();
        let w = &self.weight;
        let ratio = |t: f64| w.grad_norm(t) / w.value(t);
        match self.kind {
            InequalityKind::Hardy | InequalityKind::HardyRemainder => Ok(QuotientForms::build(
                grid,
                &self.model,
                p,
                |t| ratio(t).powf(p),
                |_| 1.0,
            )),
            InequalityKind::WeightedHardy | InequalityKind::EigenHardy => {
                let alpha = self.alpha();
                Ok(QuotientForms::build(
                    grid,
                    &self.model,
                    p,
                    |t| w.value(t).powf(alpha) * ratio(t).powf(p),
                    |t| w.value(t).powf(alpha),
                ))
            }
            InequalityKind::Caccioppoli => {
                let q = self.param("q")?;
                Ok(QuotientForms::build(
                    grid,
                    &self.model,
                    p,
                    |t| w.value(t).powf(q) * w.grad_norm(t).powf(p),
                    |t| w.value(t).powf(p + q),
                ))
            }
            InequalityKind::DivergenceLemma => {
                let field = self
                    .field
                    .as_ref()
                    .ok_or_else(|| Error::invalid("divergence-lemma case needs a vector field"))?;
                for &t in grid.nodes() {
                    let a = field.a_h(t);
                    if !(a > 0.0) && field.h(t) != 0.0 {
                        return Err(Error::Hypothesis(format!(
                            "A_h = {a} is not positive at t = {t}"
                        )));
                    }
                }
                Ok(QuotientForms::build(
                    grid,
                    &self.model,
                    p,
                    |t| field.a_h(t),
                    |t| p.powf(p) * field.h(t).abs().powf(p) / field.a_h(t).powf(p - 1.0),
                ))
            }
            InequalityKind::PoincareEigen => {
                let s = self.param("s")?;
                Ok(QuotientForms::build(
                    grid,
                    &self.model,
                    p,
                    |t| w.value(t).powf(s),
                    |t| w.value(t).powf(s),
                ))
            }
            other => Err(Error::invalid(format!(
                "{other} is not a single Rayleigh quotient"
            ))),
        }
    }
}

/// Discrete quotient `Σ stiff_i |u_{i+1} - u_i|^p / Σ mass_i |u_i|^p`.
///
/// `mass` holds the nodal trapezoid weight times density times lhs weight;
/// `stiff` holds `h s g^p a / h^p` at each cell midpoint.
#[derive(Debug, Clone)]
pub struct QuotientForms {
    pub grid: Arc<RadialGrid>,
    pub mass: Vec<f64>,
    pub stiff: Vec<f64>,
    pub p: f64,
}

impl QuotientForms {
    pub fn build(
        grid: &Arc<RadialGrid>,
        model: &ModelManifold,
        p: f64,
        q: impl Fn(f64) -> f64,
        a: impl Fn(f64) -> f64,
    ) -> Self {
        let mass = grid
            .nodes()
            .iter()
            .zip(grid.quad_weights())
            .map(|(&t, &w)| w * model.density_unchecked(t) * q(t))
            .collect();
        let h = grid.cell_widths();
        let stiff = grid
            .cell_midpoints()
            .iter()
            .zip(&h)
            .map(|(&m, &hi)| flux_coefficient(model, p, m) * a(m) * hi.powf(1.0 - p))
            .collect();
        QuotientForms {
            grid: grid.clone(),
            mass,
            stiff,
            p,
        }
    }

    /// `Σ mass_i |u_i|^p`, skipping nodes where `u` vanishes.
    pub fn lhs(&self, u: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (i, (&m, &v)) in self.mass.iter().zip(u).enumerate() {
            if v == 0.0 {
                continue;
            }
            if !m.is_finite() {
                return Err(Error::NonFinite {
                    index: i,
                    t: self.grid.nodes()[i],
                });
            }
            acc += m * v.abs().powf(self.p);
        }
        Ok(acc)
    }

    pub fn rhs(&self, u: &[f64]) -> f64 {
        self.stiff
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let d = u[i + 1] - u[i];
                if d == 0.0 {
                    0.0
                } else {
                    k * d.abs().powf(self.p)
                }
            })
            .sum()
    }

    pub fn quotient(&self, u: &[f64]) -> Result<f64> {
        let l = self.lhs(u)?;
        if !(l > 1e-300) {
            return Err(Error::ZeroDenominator("rayleigh quotient"));
        }
        Ok(self.rhs(u) / l)
    }
}

/// `Σ w_i s(t_i) q(t_i) |u_i|^power`, skipping zeros of `u`.
fn nodal_integral(
    grid: &RadialGrid,
    model: &ModelManifold,
    u: &[f64],
    power: f64,
    q: impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for (i, ((&t, &w), &v)) in grid
        .nodes()
        .iter()
        .zip(grid.quad_weights())
        .zip(u)
        .enumerate()
    {
        if v == 0.0 {
            continue;
        }
        let term = w * model.density_unchecked(t) * q(t) * v.abs().powf(power);
        if !term.is_finite() {
            return Err(Error::NonFinite { index: i, t });
        }
        acc += term;
    }
    Ok(acc)
}

/// `Σ_cells h s g^p a |Δu / h|^p` with coefficients at cell midpoints.
fn gradient_integral(
    grid: &RadialGrid,
    model: &ModelManifold,
    u: &[f64],
    p: f64,
    a: impl Fn(f64) -> f64,
) -> Result<f64> {
    let h = grid.cell_widths();
    let mut acc = 0.0;
    for (i, &m) in grid.cell_midpoints().iter().enumerate() {
        let d = u[i + 1] - u[i];
        if d == 0.0 {
            continue;
        }
        let term = h[i] * flux_coefficient(model, p, m) * a(m) * (d / h[i]).abs().powf(p);
        if !term.is_finite() {
            return Err(Error::NonFinite { index: i, t: m });
        }
        acc += term;
    }
    Ok(acc)
}

fn check_kind(case: &InequalityCase, kinds: &[InequalityKind]) -> Result<()> {
    if kinds.contains(&case.kind) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "case {} has kind {}, expected one of {:?}",
            case.id, case.kind, kinds
        )))
    }
}

fn quotient_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    let forms = case.forms(u.grid())?;
    let v = u.values();
    SidePair::new(forms.lhs(v)?, forms.rhs(v), case.constant)
}

/// `lhs = int |u|^p |grad rho|^p / rho^p`, `rhs = int |grad u|^p`.
pub fn hardy_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(
        case,
        &[InequalityKind::Hardy, InequalityKind::HardyRemainder],
    )?;
    quotient_sides(case, u)
}

/// Both integrands of [`hardy_sides`] multiplied by `rho^alpha`.
pub fn weighted_hardy_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(
        case,
        &[InequalityKind::WeightedHardy, InequalityKind::EigenHardy],
    )?;
    quotient_sides(case, u)
}

/// `lhs = int rho^q |grad rho|^p |u|^p`, `rhs = int rho^{p+q} |grad u|^p`.
pub fn caccioppoli_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(case, &[InequalityKind::Caccioppoli])?;
    quotient_sides(case, u)
}

/// `lhs = int |u|^p A_h`, `rhs = p^p int |h|^p / A_h^{p-1} |grad u|^p`.
pub fn divergence_lemma_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(case, &[InequalityKind::DivergenceLemma])?;
    quotient_sides(case, u)
}

/// `lhs = int |u|^s d^{1-p}`, `rhs = C (int |grad u|^p)^{1/p'} (int |u|^delta)^{1/p}`.
/// The constant is folded into `rhs`, so the pair's constant is 1.
pub fn gn_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(case, &[InequalityKind::GagliardoNirenberg])?;
    let p = case.p();
    let s = case.param("s")?;
    let delta = case.param("delta")?;
    let g = u.grid();
    let v = u.values();
    let m = &case.model;
    let lhs = nodal_integral(g, m, v, s, |t| t.powf(1.0 - p))?;
    let grad = gradient_integral(g, m, v, p, |_| 1.0)?;
    let ld = nodal_integral(g, m, v, delta, |_| 1.0)?;
    let rhs = case.constant * grad.powf((p - 1.0) / p) * ld.powf(1.0 / p);
    SidePair::new(lhs, rhs, 1.0)
}

/// `lhs = int |u|^s`, `rhs = C (int |grad u|^p)^{1/a} (int |u|^{(as-p)/(a-1)} d^{p(a'-1)})^{1/a'}`.
/// The constant is folded into `rhs`.
pub fn uncertainty_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(case, &[InequalityKind::Uncertainty])?;
    let p = case.p();
    let s = case.param("s")?;
    let a = case.param("a")?;
    let a_conj = a / (a - 1.0);
    let e = (a * s - p) / (a - 1.0);
    let g = u.grid();
    let v = u.values();
    let m = &case.model;
    let lhs = nodal_integral(g, m, v, s, |_| 1.0)?;
    let grad = gradient_integral(g, m, v, p, |_| 1.0)?;
    let moment = nodal_integral(g, m, v, e, |t| t.powf(p * (a_conj - 1.0)))?;
    let rhs = case.constant * grad.powf(1.0 / a) * moment.powf(1.0 / a_conj);
    SidePair::new(lhs, rhs, 1.0)
}

/// `lhs = (int rho^{p* theta} |u|^{p*})^{1/p*}`, `rhs = (int rho^{p theta} |grad u|^p)^{1/p}`.
pub fn hardy_sobolev_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(case, &[InequalityKind::HardySobolev])?;
    let p = case.p();
    let theta = case.param("theta")?;
    let pstar = case.param("pstar")?;
    let w = &case.weight;
    let g = u.grid();
    let v = u.values();
    let m = &case.model;
    let lhs = nodal_integral(g, m, v, pstar, |t| w.value(t).powf(pstar * theta))?.powf(1.0 / pstar);
    let rhs = gradient_integral(g, m, v, p, |t| w.value(t).powf(p * theta))?.powf(1.0 / p);
    SidePair::new(lhs, rhs, case.constant)
}

/// `lhs = (int |u|^r rho^{-gamma r} |grad rho|^{(gamma+eps) r})^{1/r}`,
/// `rhs = (int rho^{theta p} |grad u|^p)^{a/p} (int |u|^p |grad rho|^{(delta+sigma)p} rho^{-delta p})^{(1-a)/p}`.
pub fn ckn_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    check_kind(case, &[InequalityKind::Ckn])?;
    let p = case.p();
    let [r, a, theta, gamma, delta, eps, sigma] =
        ["r", "a", "theta", "gamma", "delta", "eps", "sigma"].map(|k| case.params[k]);
    let w = &case.weight;
    let g = u.grid();
    let v = u.values();
    let m = &case.model;
    let lhs = nodal_integral(g, m, v, r, |t| {
        w.value(t).powf(-gamma * r) * w.grad_norm(t).powf((gamma + eps) * r)
    })?
    .powf(1.0 / r);
    let grad = gradient_integral(g, m, v, p, |t| w.value(t).powf(theta * p))?;
    let second = nodal_integral(g, m, v, p, |t| {
        w.grad_norm(t).powf((delta + sigma) * p) * w.value(t).powf(-delta * p)
    })?;
    let rhs = grad.powf(a / p) * second.powf((1.0 - a) / p);
    SidePair::new(lhs, rhs, case.constant)
}

/// Dispatches on the case kind.
pub fn evaluate_sides(case: &InequalityCase, u: &GridFunction) -> Result<SidePair> {
    match case.kind {
        InequalityKind::Hardy | InequalityKind::HardyRemainder => hardy_sides(case, u),
        InequalityKind::WeightedHardy | InequalityKind::EigenHardy => weighted_hardy_sides(case, u),
        InequalityKind::Caccioppoli => caccioppoli_sides(case, u),
        InequalityKind::DivergenceLemma => divergence_lemma_sides(case, u),
        InequalityKind::GagliardoNirenberg => gn_sides(case, u),
        InequalityKind::Uncertainty => uncertainty_sides(case, u),
        InequalityKind::HardySobolev => hardy_sobolev_sides(case, u),
        InequalityKind::Ckn => ckn_sides(case, u),
        InequalityKind::PoincareEigen => quotient_sides(case, u),
    }
}

/// `rhs / lhs`; the stated constant is a lower bound for it.
pub fn rayleigh_quotient(case: &InequalityCase, u: &GridFunction) -> Result<f64> {
    let sp = evaluate_sides(case, u)?;
    if !(sp.lhs > 1e-300) {
        return Err(Error::ZeroDenominator("rayleigh_quotient"));
    }
    Ok(sp.rhs / sp.lhs)
}

/// `I(u) = rhs - constant * lhs`.
pub fn hardy_gap(case: &InequalityCase, u: &GridFunction) -> Result<f64> {
    Ok(evaluate_sides(case, u)?.margin)
}

/// `int u^2 dv` on the case's model.
pub fn l2_mass(model: &ModelManifold, u: &GridFunction) -> Result<f64> {
    nodal_integral(u.grid(), model, u.values(), 2.0, |_| 1.0)
}

/// 64-bit FNV-1a hash, used to derive per-case seeds.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn case_seed(global: u64, id: &str) -> u64 {
    global ^ fnv1a(id)
}

/// Seeded random test functions vanishing at both grid ends: smooth bumps
/// `exp(-1/(1 - z^2))` on random subintervals of the grid coordinate, with
/// every fourth one a piecewise-linear tent.
pub fn random_test_functions(grid: &Arc<RadialGrid>, count: usize, seed: u64) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let xi: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| grid.to_grid_coordinate(t))
        .collect();
    let (x0, x1) = (xi[0], xi[n - 1]);
    let min_len = 8.0 * (x1 - x0) / (n - 1) as f64;
    (0..count)
        .map(|k| {
            let len = rng.gen_range(min_len.min(x1 - x0)..=(x1 - x0));
            let start = rng.gen_range(x0..=(x1 - len));
            let (a, b) = (start, start + len);
            let amp = rng.gen_range(0.5..2.0);
            let tent = k % 4 == 3;
            let peak = rng.gen_range(0.25..0.75);
            let mut values: Vec<f64> = xi
                .iter()
                .map(|&x| {
                    if x <= a || x >= b {
                        return 0.0;
                    }
                    if tent {
                        let c = a + peak * (b - a);
                        if x <= c {
                            amp * (x - a) / (c - a)
                        } else {
                            amp * (b - x) / (b - c)
                        }
                    } else {
                        let z = (2.0 * x - a - b) / (b - a);
                        amp * (-1.0 / (1.0 - z * z)).exp() * std::f64::consts::E
                    }
                })
                .collect();
            values[0] = 0.0;
            values[n - 1] = 0.0;
            GridFunction::new(grid.clone(), values, true).expect("ends are zero")
        })
        .collect()
}
