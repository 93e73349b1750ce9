//! Radial p-capacity of condensers `B_a ⊂ B_b` and the resulting
//! p-parabolic / p-hyperbolic classification of model manifolds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::InequalityCase;
use crate::geometry::ModelManifold;
use crate::grids::{build_grid, CoordinateRange, GridFunction, Spacing};
use crate::optimize::{log_substitution_oracle, minimize_quotient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassificationHint {
    Vanishing,
    BoundedBelow,
}

#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub value: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Capacitary potential, equal to 1 at the inner radius and 0 at the outer.
    pub extremal_profile: GridFunction,
    pub classification_hint: ClassificationHint,
}

/// Number of nodes of the returned capacitary potential.
const PROFILE_NODES: usize = 401;

fn check_condenser(m: &ModelManifold, p: f64, a: f64, b: f64) -> Result<()> {
    if !m.is_radial() {
        return Err(Error::UnsupportedModel {
            model: m.to_string(),
            op: "radial_capacity",
        });
    }
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::invalid(format!(
            "condenser needs 0 < a < b, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// `s(t)^{-1/(p-1)}`.
fn potential_density(m: &ModelManifold, p: f64, t: f64) -> f64 {
    m.density_unchecked(t).powf(-1.0 / (p - 1.0))
}

/// `int_a^b s^{-1/(p-1)}` by composite Simpson in `ln t`.
fn potential_integral(m: &ModelManifold, p: f64, a: f64, b: f64) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    let cells = ((lb - la) * 2000.0).ceil().max(200.0) as usize * 2;
    let h = (lb - la) / cells as f64;
    let f = |x: f64| {
        let t = x.exp();
        potential_density(m, p, t) * t
    };
    let mut acc = f(la) + f(lb);
    for i in 1..cells {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(la + i as f64 * h);
    }
    acc * h / 3.0
}

/// `cap_p(B_a, B_b) = (int_a^b s^{-1/(p-1)})^{1-p}` with its potential.
pub fn radial_capacity(m: &ModelManifold, p: f64, a: f64, b: f64) -> Result<CapacityResult> {
    check_condenser(m, p, a, b)?;
    let total = potential_integral(m, p, a, b);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonFinite { index: 0, t: a });
    }
    let value = total.powf(1.0 - p);
    let grid = Arc::new(build_grid(
        CoordinateRange::closed(a, b),
        PROFILE_NODES,
        Spacing::Logarithmic,
    )?);
    let nodes = grid.nodes();
    let mut profile = vec![0.0; nodes.len()];
    for i in (0..nodes.len() - 1).rev() {
        let (x0, x1) = (nodes[i].ln(), nodes[i + 1].ln());
        let f = |x: f64| potential_density(m, p, x.exp()) * x.exp();
        let cell = (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
        profile[i] = profile[i + 1] + cell;
    }
    let top = profile[0];
    profile
        .iter_mut()
        .for_each(|v| *v = (*v / top).clamp(0.0, 1.0));
    Ok(CapacityResult {
        value,
        inner_radius: a,
        outer_radius: b,
        extremal_profile: GridFunction::new(grid, profile, false)?,
        classification_hint: if value < 1e-12 {
            ClassificationHint::Vanishing
        } else {
            ClassificationHint::BoundedBelow
        },
    })
}

/// Capacity by direct minimisation of the discrete energy
/// `Σ k_i |u_{i+1} - u_i|^p` with `u = 1` at `a` and `u = 0` at `b`, using
/// damped Kačanov iterations on a logarithmic grid with `n` nodes.
pub fn direct_capacity(m: &ModelManifold, p: f64, a: f64, b: f64, n: usize) -> Result<f64> {
    check_condenser(m, p, a, b)?;
    let grid = build_grid(CoordinateRange::closed(a, b), n, Spacing::Logarithmic)?;
    let h = grid.cell_widths();
    let k: Vec<f64> = grid
        .cell_midpoints()
        .iter()
        .zip(&h)
        .map(|(&t, &hi)| m.density_unchecked(t) * hi.powf(1.0 - p))
        .collect();
    let energy = |u: &[f64]| -> f64 {
        k.iter()
            .enumerate()
            .map(|(i, &c)| c * (u[i + 1] - u[i]).abs().powf(p))
            .sum()
    };
    let mut u: Vec<f64> = (0..n).map(|i| 1.0 - i as f64 / (n - 1) as f64).collect();
    let mut e = energy(&u);
    let mut omega = (1.0 / (p - 1.0)).min(1.0);
    for _ in 0..10_000 {
        // Kačanov step: minimise Σ c_i (Δv_i)^2 with c_i = k_i |Δu_i|^{p-2};
        // in 1D the solution has Δv_i ∝ 1/c_i.
        let inv: Vec<f64> = k
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let d = (u[i + 1] - u[i]).abs().max(1e-300);
                1.0 / (c * d.powf(p - 2.0))
            })
            .collect();
        let total: f64 = inv.iter().sum();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for i in 0..n - 1 {
            v[i + 1] = v[i] - inv[i] / total;
        }
        v[n - 1] = 0.0;
        let mut accepted = false;
        while omega > 1e-6 {
            let trial: Vec<f64> = u.iter().zip(&v).map(|(x, y)| x + omega * (y - x)).collect();
            let et = energy(&trial);
            if et <= e {
                let done = (e - et) <= 1e-14 * e;
                u = trial;
                e = et;
                accepted = true;
                if done {
                    return Ok(e);
                }
                break;
            }
            omega *= 0.5;
        }
        if !accepted {
            return Ok(e);
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parabolicity {
    PParabolic,
    PHyperbolic,
    Inconclusive,
}

/// Trend thresholds of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendThresholds {
    /// Parabolic needs `last / first` below this.
    pub ratio: f64,
    /// Parabolic needs the tail slope of `ln cap` against `ln ln(b/a)` below this.
    pub slope: f64,
}

impl Default for TrendThresholds {
    fn default() -> Self {
        TrendThresholds {
            ratio: 0.1,
            slope: -0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicityResult {
    pub classification: Parabolicity,
    pub schedule: Vec<f64>,
    pub values: Vec<f64>,
    pub ratio: f64,
    pub slope: f64,
    /// Smallest capacity seen, a lower estimate of the limit.
    pub liminf: f64,
}

/// `b = a 10^k`, `k = 1..=12`.
pub fn default_schedule(a: f64) -> Vec<f64> {
    (1..=12).map(|k| a * 10f64.powi(k)).collect()
}

pub fn classify_parabolicity(
    m: &ModelManifold,
    p: f64,
    a: f64,
    schedule: &[f64],
) -> Result<ParabolicityResult> {
    classify_parabolicity_with(m, p, a, schedule, TrendThresholds::default())
}

/// Classifies by the trend of `cap_p(B_a, B_b)` along an increasing `b`
/// schedule: logarithmic or faster decay to zero means p-parabolic.
pub fn classify_parabolicity_with(
    m: &ModelManifold,
    p: f64,
    a: f64,
    schedule: &[f64],
    th: TrendThresholds,
) -> Result<ParabolicityResult> {
    if schedule.len() < 4 {
        return Err(Error::invalid("schedule needs at least 4 radii"));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) || !(schedule[0] > a) {
        return Err(Error::invalid("schedule must increase and start above a"));
    }
    if (schedule[schedule.len() - 1] / schedule[0]).log10() < 4.0 - 1e-9 {
        return Err(Error::invalid("schedule must span at least 4 decades"));
    }
    let values: Vec<f64> = schedule
        .iter()
        .map(|&b| radial_capacity(m, p, a, b).map(|c| c.value))
        .collect::<Result<_>>()?;
    let ratio = values[values.len() - 1] / values[0];
    let tail = schedule.len() / 2;
    let xs: Vec<f64> = schedule[tail..]
        .iter()
        .map(|&b| (b / a).ln().ln())
        .collect();
    let ys: Vec<f64> = values[tail..].iter().map(|v| v.max(1e-300).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let decays = ratio < th.ratio;
    let steep = slope < th.slope;
    let classification = match (decays, steep) {
        (true, true) => Parabolicity::PParabolic,
        (false, false) => Parabolicity::PHyperbolic,
        _ => Parabolicity::Inconclusive,
    };
    let liminf = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ParabolicityResult {
        classification,
        schedule: schedule.to_vec(),
        values,
        ratio,
        slope,
        liminf,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunctureReport {
    pub eps: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Quotients with the oracle correction removed, where the oracle applies.
    pub corrected: Vec<f64>,
    /// Unpunctured prediction, where the oracle applies.
    pub predicted: Option<f64>,
    /// Largest relative spread of the corrected (or raw) values.
    pub spread: f64,
    pub consistent: bool,
}

/// Minimised quotients on `(eps, hi)` for a shrinking `eps` schedule. With
/// the oracle the corrected limits must agree with the unpunctured
/// prediction within 1%; otherwise the raw quotients must be stable
/// within 2%.
pub fn puncture_insensitivity_check(
    case: &InequalityCase,
    eps_schedule: &[f64],
) -> Result<PunctureReport> {
    let p = case.p();
    if case.model.is_radial() && !(p < case.model.dim() as f64) {
        return Err(Error::Hypothesis(format!(
            "puncture check needs p < N, got p = {p}, N = {}",
            case.model.dim()
        )));
    }
    let per_decade = (case.n as f64 / (case.range.hi / case.range.lo).log10().max(1.0)).ceil();
    let mut quotients = Vec::new();
    let mut corrected = Vec::new();
    let mut predicted = None;
    for &eps in eps_schedule {
        let range = CoordinateRange {
            lo: eps,
            ..case.range
        };
        let n = (per_decade * (range.hi / range.lo).log10()).ceil() as usize + 1;
        let c = case
            .clone()
            .with_range(range)
            .with_grid(n.max(3), Spacing::Logarithmic);
        let r = minimize_quotient(&c)?;
        quotients.push(r.quotient);
        match log_substitution_oracle(&c) {
            Some((lim, corr)) => {
                predicted = Some(lim);
                corrected.push(r.quotient - corr);
            }
            None => corrected.push(r.quotient),
        }
    }
    let (spread, consistent) = match predicted {
        Some(lim) => {
            let s = corrected
                .iter()
                .map(|c| (c - lim).abs() / lim)
                .fold(0.0, f64::max);
            (s, s < 0.01)
        }
        None => {
            let hi = corrected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = corrected.iter().cloned().fold(f64::INFINITY, f64::min);
            let s = (hi - lo) / lo.abs().max(1e-300);
            (s, s < 0.02)
        }
    };
    Ok(PunctureReport {
        eps: eps_schedule.to_vec(),
        quotients,
        corrected,
        predicted,
        spread,
        consistent,
    })
}
