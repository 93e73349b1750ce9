//! First Dirichlet eigenpair of the reduced p-Laplacian and the Hardy and
//! Poincaré inequalities built from it.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{evaluate_sides, InequalityCase, InequalityKind, QuotientForms, SidePair};
use crate::geometry::ModelManifold;
use crate::grids::{GridFunction, RadialGrid};
use crate::optimize::{inverse_iteration, minimize_forms_general, Boundary, DescentOptions};
use crate::weights::WeightSpec;

pub const TOL_EIG_P2: f64 = 1e-6;
pub const TOL_EIG: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub model: ModelManifold,
    pub p: f64,
    pub lambda1: f64,
    /// Positive in the interior, sup-normalised to 1.
    pub phi1: GridFunction,
    pub residual: f64,
    pub converged: bool,
}

impl EigenPair {
    pub fn tolerance(&self) -> f64 {
        if self.p == 2.0 {
            TOL_EIG_P2
        } else {
            TOL_EIG
        }
    }

    /// The eigenfunction as a sampled weight.
    pub fn weight(&self) -> WeightSpec {
        WeightSpec::eigenfunction(self.model, self.p, self.lambda1, &self.phi1)
    }
}

/// `max |A(φ)φ - λ B(φ)φ| / max |λ B(φ)φ|` over interior nodes: the
/// discrete residual of `-Δ_p φ = λ |φ|^{p-2} φ`. `mass_off` couples
/// neighbouring nodes and is only used for `p = 2`.
fn residual(
    forms: &QuotientForms,
    mass_diag: &[f64],
    mass_off: &[f64],
    phi: &[f64],
    lambda: f64,
) -> f64 {
    let p = forms.p;
    let n = phi.len();
    let flux: Vec<f64> = forms
        .stiff
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let d = phi[i + 1] - phi[i];
            k * d.abs().powf(p - 1.0) * d.signum()
        })
        .collect();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 1..n - 1 {
        let div = flux[i - 1] - flux[i];
        let src = if p == 2.0 {
            lambda
                * (mass_diag[i] * phi[i] + mass_off[i - 1] * phi[i - 1] + mass_off[i] * phi[i + 1])
        } else {
            lambda * mass_diag[i] * phi[i].abs().powf(p - 1.0) * phi[i].signum()
        };
        num = num.max((div - src).abs());
        den = den.max(src.abs());
    }
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Average of the lumped and consistent linear-element mass matrices, with
/// cell stencil `w/12 [5 1; 1 5]`. On a uniform grid it cancels the leading
/// `h^2` error of the lumped scheme, so the eigenvalue error is `O(h^4)`.
fn blended_mass(forms: &QuotientForms, model: &ModelManifold) -> (Vec<f64>, Vec<f64>) {
    let grid = &forms.grid;
    let diag = forms.mass.iter().map(|m| m * 5.0 / 6.0).collect();
    let off = grid
        .cell_widths()
        .iter()
        .zip(grid.cell_midpoints())
        .map(|(h, t)| h * model.density_unchecked(t) / 12.0)
        .collect();
    (diag, off)
}

/// First eigenpair with Dirichlet conditions at both grid ends.
pub fn first_eigenpair(model: &ModelManifold, p: f64, grid: &Arc<RadialGrid>) -> Result<EigenPair> {
    model.validate()?;
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    for &t in &[grid.lo(), grid.hi()] {
        if !(model.contains(t) || (t == 0.0 && model.is_radial())) {
            return Err(Error::Domain {
                model: model.to_string(),
                t,
            });
        }
    }
    let forms = QuotientForms::build(grid, model, p, |_| 1.0, |_| 1.0);
    let (mass_diag, mass_off) = if p == 2.0 {
        blended_mass(&forms, model)
    } else {
        (forms.mass.clone(), vec![0.0; forms.stiff.len()])
    };
    let result = if p == 2.0 {
        inverse_iteration(&forms, &mass_diag, &mass_off, Boundary::DIRICHLET)?
    } else {
        let x0 = grid.to_grid_coordinate(grid.lo());
        let x1 = grid.to_grid_coordinate(grid.hi());
        let u0: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&t| {
                (PI * (grid.to_grid_coordinate(t) - x0) / (x1 - x0))
                    .sin()
                    .max(0.0)
            })
            .collect();
        let opts = DescentOptions {
            rel_tol: 1e-14,
            positive: true,
            ..DescentOptions::default()
        };
        minimize_forms_general(&forms, &u0, opts)?
    };
    let mut values = result.minimizer.values().to_vec();
    let peak = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    values.iter_mut().for_each(|v| *v = v.abs() / peak);
    let res = residual(&forms, &mass_diag, &mass_off, &values, result.quotient);
    Ok(EigenPair {
        model: *model,
        p,
        lambda1: result.quotient,
        phi1: GridFunction::new(grid.clone(), values, true)?,
        residual: res,
        converged: result.converged,
    })
}

fn pair_case(
    pair: &EigenPair,
    kind: InequalityKind,
    params: BTreeMap<String, f64>,
) -> Result<InequalityCase> {
    let grid = pair.phi1.grid();
    let c = InequalityCase::new(format!("{kind}"), kind, pair.weight(), grid.range(), params)?;
    Ok(c.with_grid(grid.len(), grid.spacing()))
}

fn same_grid(pair: &EigenPair, u: &GridFunction) -> Result<()> {
    if pair.phi1.grid().nodes() != u.grid().nodes() {
        return Err(Error::invalid(
            "test function and eigenfunction live on different grids",
        ));
    }
    Ok(())
}

/// Weighted Hardy inequality with `rho = φ1` and constant `((p-1-α)/p)^p`.
pub fn eigen_hardy_check(pair: &EigenPair, alpha: f64, u: &GridFunction) -> Result<SidePair> {
    same_grid(pair, u)?;
    // alpha = p - 1 has constant zero and is reported as a degenerate case
    let kind = if alpha == pair.p - 1.0 {
        InequalityKind::WeightedHardy
    } else {
        InequalityKind::EigenHardy
    };
    let mut params = BTreeMap::new();
    params.insert("alpha".to_string(), alpha);
    let c = pair_case(pair, kind, params)?;
    evaluate_sides(&c, u)
}

/// `λ1 (p-1-s)^{p-1}/p^p int φ1^s |u|^p <= int φ1^s |grad u|^p`, `0 < s < p-1`.
pub fn poincare_eigen_check(pair: &EigenPair, s: f64, u: &GridFunction) -> Result<SidePair> {
    same_grid(pair, u)?;
    if !(s > 0.0 && s < pair.p - 1.0) {
        return Err(Error::invalid(format!("need 0 < s < p - 1, got s = {s}")));
    }
    let mut params = BTreeMap::new();
    params.insert("s".to_string(), s);
    params.insert("lambda1".to_string(), pair.lambda1);
    let c = pair_case(pair, InequalityKind::PoincareEigen, params)?;
    evaluate_sides(&c, u)
}

/// Ingredients of the distance-Hardy constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeConstant {
    /// `min |φ1'|` on the collar `d < ε`.
    pub b: f64,
    /// Lipschitz bound `max |φ1'|`.
    pub lipschitz: f64,
    /// `min φ1` on `d >= ε`.
    pub l_eps: f64,
    pub c: f64,
}

/// Hardy inequality for the distance to the boundary of an interval, with
/// the constant `c = min{((p-1)/p)^p b^p/L^p, λ1 (p-1-s)^{p-1}/p^p l_ε^s ε^p} / 2`.
pub fn distance_hardy_composite(
    pair: &EigenPair,
    eps: f64,
    s: f64,
    u: &GridFunction,
) -> Result<(SidePair, CompositeConstant)> {
    same_grid(pair, u)?;
    let (a, bnd) = match pair.model {
        ModelManifold::Interval { a, b } => (a, b),
        m => {
            return Err(Error::UnsupportedModel {
                model: m.to_string(),
                op: "distance_hardy_composite",
            })
        }
    };
    if !(s > 0.0 && s < pair.p - 1.0) {
        return Err(Error::invalid(format!("need 0 < s < p - 1, got s = {s}")));
    }
    if !(eps > 0.0 && 2.0 * eps < bnd - a) {
        return Err(Error::invalid(format!(
            "collar width {eps} does not fit the interval"
        )));
    }
    let p = pair.p;
    let grid = pair.phi1.grid();
    let nodes = grid.nodes();
    let phi = pair.phi1.values();
    let dphi = pair.phi1.derivative();
    let dist = |t: f64| (t - a).min(bnd - t);
    let mut b = f64::INFINITY;
    let mut lip = 0.0f64;
    let mut l_eps = f64::INFINITY;
    for i in 0..nodes.len() {
        let d = dist(nodes[i]);
        lip = lip.max(dphi[i].abs());
        if d < eps {
            b = b.min(dphi[i].abs());
        } else {
            l_eps = l_eps.min(phi[i]);
        }
    }
    if !(b > 1e-12) {
        return Err(Error::Hypothesis(format!(
            "eigenfunction gradient vanishes on the collar (min {b})"
        )));
    }
    let first = ((p - 1.0) / p).powf(p) * (b / lip).powf(p);
    let second =
        pair.lambda1 * (p - 1.0 - s).powf(p - 1.0) / p.powf(p) * l_eps.powf(s) * eps.powf(p);
    let c = 0.5 * first.min(second);
    let forms = QuotientForms::build(grid, &pair.model, p, |t| dist(t).powf(-p), |_| 1.0);
    let v = u.values();
    let sides = SidePair::new(forms.lhs(v)?, forms.rhs(v), c)?;
    Ok((
        sides,
        CompositeConstant {
            b,
            lipschitz: lip,
            l_eps,
            c,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{random_test_functions, TOL_DISC};
    use crate::grids::{build_grid, CoordinateRange, Spacing};

    fn interval_grid(a: f64, b: f64, n: usize) -> Arc<RadialGrid> {
        Arc::new(build_grid(CoordinateRange::closed(a, b), n, Spacing::Linear).unwrap())
    }

    #[test]
    fn unit_interval_p2() {
        let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
        let pair = first_eigenpair(&iv, 2.0, &interval_grid(0.0, 1.0, 2000)).unwrap();
        assert!((pair.lambda1 - PI * PI).abs() < 1e-6, "{}", pair.lambda1);
        assert!(pair.residual < TOL_EIG_P2, "{}", pair.residual);
        let x = 0.3;
        assert!((pair.phi1.interpolate(x) - (PI * x).sin()).abs() < 1e-5);
    }

    #[test]
    fn length_scaling() {
        let iv = ModelManifold::Interval { a: 0.0, b: 2.0 };
        let pair = first_eigenpair(&iv, 2.0, &interval_grid(0.0, 2.0, 2000)).unwrap();
        assert!((pair.lambda1 - PI * PI / 4.0).abs() < 1e-6);
    }

    #[test]
    fn descent_agrees_with_inverse_iteration() {
        use crate::optimize::minimize_forms_p2;
        let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
        let g = interval_grid(0.0, 1.0, 400);
        let forms = QuotientForms::build(&g, &iv, 2.0, |_| 1.0, |_| 1.0);
        let a = minimize_forms_p2(&forms, Boundary::DIRICHLET).unwrap();
        let u0: Vec<f64> = g.nodes().iter().map(|&x| x * (1.0 - x)).collect();
        let opts = DescentOptions {
            rel_tol: 1e-14,
            positive: true,
            ..DescentOptions::default()
        };
        let b = minimize_forms_general(&forms, &u0, opts).unwrap();
        assert!((a.quotient / b.quotient - 1.0).abs() < 1e-8);
    }

    #[test]
    fn domain_monotonicity() {
        for &p in &[2.0, 3.0] {
            let small = ModelManifold::Interval { a: 0.0, b: 1.0 };
            let big = ModelManifold::Interval { a: 0.0, b: 1.5 };
            let l1 = first_eigenpair(&small, p, &interval_grid(0.0, 1.0, 400))
                .unwrap()
                .lambda1;
            let l2 = first_eigenpair(&big, p, &interval_grid(0.0, 1.5, 600))
                .unwrap()
                .lambda1;
            assert!(l2 < l1);
        }
    }

    #[test]
    fn eigen_inequalities_hold() {
        let iv = ModelManifold::Interval { a: 0.0, b: 1.0 };
        let g = interval_grid(0.0, 1.0, 1000);
        let pair = first_eigenpair(&iv, 2.0, &g).unwrap();
        for u in random_test_functions(&g, 30, 9) {
            assert!(eigen_hardy_check(&pair, 0.0, &u).unwrap().holds(TOL_DISC));
            let t = eigen_hardy_check(&pair, 1.0, &u).unwrap();
            assert_eq!(t.margin, t.rhs);
            assert!(poincare_eigen_check(&pair, 0.5, &u)
                .unwrap()
                .holds(TOL_DISC));
            let (sp, cc) = distance_hardy_composite(&pair, 0.1, 0.5, &u).unwrap();
            assert!(cc.c > 0.0);
            assert!(sp.holds(TOL_DISC));
        }
        assert!(poincare_eigen_check(&pair, 1.0, &GridFunction::zeros(g.clone())).is_err());
        let z = GridFunction::zeros(g);
        assert_eq!(poincare_eigen_check(&pair, 0.5, &z).unwrap().margin, 0.0);
    }
}
