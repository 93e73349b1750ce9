//! Model manifolds admitting a one-dimensional reduction.
//!
//! Every inequality handled by this crate is evaluated on functions of a
//! single coordinate: the geodesic radius on rotationally symmetric models,
//! the height `y` on the Poincaré half-plane, or `x` on an interval. A model
//! supplies the volume density of the reduced measure and the factor turning
//! a coordinate derivative into a Riemannian gradient norm.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelManifold {
    /// `R^N` in polar coordinates about the origin.
    EuclideanRadial { dim: u32 },
    /// Hyperbolic space `H^N` of curvature `-1` in geodesic polar coordinates.
    HyperbolicRadial { dim: u32 },
    /// Upper half-plane with metric `(dx^2 + dy^2) / y^2`, per unit horizontal length.
    HalfPlanePoincare,
    /// A bounded interval `[a, b]` of the real line.
    Interval { a: f64, b: f64 },
}

impl fmt::Display for ModelManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelManifold::EuclideanRadial { dim } => write!(f, "euclidean-radial(N={dim})"),
            ModelManifold::HyperbolicRadial { dim } => write!(f, "hyperbolic-radial(N={dim})"),
            ModelManifold::HalfPlanePoincare => write!(f, "half-plane-poincare"),
            ModelManifold::Interval { a, b } => write!(f, "interval({a}, {b})"),
        }
    }
}

/// Area of the unit sphere `S^{n}` embedded in `R^{n+1}`.
pub fn unit_sphere_area(n: u32) -> f64 {
    // sigma_0 = 2, sigma_1 = 2 pi, sigma_n = 2 pi / (n - 1) * sigma_{n-2}
    let mut even = 2.0;
    let mut odd = 2.0 * PI;
    if n == 0 {
        return even;
    }
    let mut k = 1;
    while k < n {
        k += 1;
        if k % 2 == 0 {
            even *= 2.0 * PI / (k - 1) as f64;
        } else {
            odd *= 2.0 * PI / (k - 1) as f64;
        }
    }
    if n.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

impl ModelManifold {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelManifold::EuclideanRadial { dim } | ModelManifold::HyperbolicRadial { dim } => {
                if dim < 2 {
                    return Err(Error::invalid(format!(
                        "radial model needs N >= 2, got {dim}"
                    )));
                }
            }
            ModelManifold::Interval { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::invalid(format!(
                        "interval needs a < b, got ({a}, {b})"
                    )));
                }
            }
            ModelManifold::HalfPlanePoincare => {}
        }
        Ok(())
    }

    /// Name of the reduction coordinate.
    pub fn coordinate(&self) -> &'static str {
        match self {
            ModelManifold::EuclideanRadial { .. } | ModelManifold::HyperbolicRadial { .. } => "r",
            ModelManifold::HalfPlanePoincare => "y",
            ModelManifold::Interval { .. } => "x",
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            ModelManifold::EuclideanRadial { .. } | ModelManifold::HyperbolicRadial { .. }
        )
    }

    /// Dimension of the manifold (the half-plane is two dimensional, the interval one).
    pub fn dim(&self) -> u32 {
        match *self {
            ModelManifold::EuclideanRadial { dim } | ModelManifold::HyperbolicRadial { dim } => dim,
            ModelManifold::HalfPlanePoincare => 2,
            ModelManifold::Interval { .. } => 1,
        }
    }

    /// Whether `t` lies in the coordinate range of the model. Radial models and
    /// the half-plane exclude `t = 0`; intervals include their endpoints.
    pub fn contains(&self, t: f64) -> bool {
        if !t.is_finite() {
            return false;
        }
        match *self {
            ModelManifold::Interval { a, b } => a <= t && t <= b,
            _ => t > 0.0,
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain {
                model: self.to_string(),
                t,
            })
        }
    }

    pub fn volume_density(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.density_unchecked(t))
    }

    pub fn gradient_factor(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.gradient_factor_unchecked(t))
    }

    /// `Delta r` for the distance from the pole; equality case of the
    /// Cartan-Hadamard comparison on the model spaces.
    pub fn laplacian_of_distance(&self, t: f64) -> Result<f64> {
        match *self {
            ModelManifold::EuclideanRadial { dim } => {
                self.check(t)?;
                Ok((dim - 1) as f64 / t)
            }
            ModelManifold::HyperbolicRadial { dim } => {
                self.check(t)?;
                Ok((dim - 1) as f64 / t.tanh())
            }
            _ => Err(Error::UnsupportedModel {
                model: self.to_string(),
                op: "laplacian_of_distance",
            }),
        }
    }

    pub(crate) fn density_unchecked(&self, t: f64) -> f64 {
        match *self {
            ModelManifold::EuclideanRadial { dim } => {
                unit_sphere_area(dim - 1) * t.powi(dim as i32 - 1)
            }
            ModelManifold::HyperbolicRadial { dim } => {
                unit_sphere_area(dim - 1) * t.sinh().powi(dim as i32 - 1)
            }
            ModelManifold::HalfPlanePoincare => 1.0 / (t * t),
            ModelManifold::Interval { .. } => 1.0,
        }
    }

    pub(crate) fn gradient_factor_unchecked(&self, t: f64) -> f64 {
        match self {
            ModelManifold::HalfPlanePoincare => t,
            _ => 1.0,
        }
    }

    /// `s'(t) / s(t)` for the volume density `s`.
    pub(crate) fn density_log_derivative(&self, t: f64) -> f64 {
        match *self {
            ModelManifold::EuclideanRadial { dim } => (dim - 1) as f64 / t,
            ModelManifold::HyperbolicRadial { dim } => (dim - 1) as f64 / t.tanh(),
            ModelManifold::HalfPlanePoincare => -2.0 / t,
            ModelManifold::Interval { .. } => 0.0,
        }
    }

    /// `g'(t) / g(t)` for the gradient factor `g`.
    pub(crate) fn gradient_factor_log_derivative(&self, t: f64) -> f64 {
        match self {
            ModelManifold::HalfPlanePoincare => 1.0 / t,
            _ => 0.0,
        }
    }
}
