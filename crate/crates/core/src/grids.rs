//! Nonuniform one-dimensional grids with composite trapezoid quadrature and
//! second-order finite differences.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Logarithmic,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Linear => f.write_str("linear"),
            Spacing::Logarithmic => f.write_str("logarithmic"),
        }
    }
}

/// A truncated coordinate range. An open endpoint is excluded from the node
/// set; the grid then starts at the first node strictly inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateRange {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub open_lo: bool,
    #[serde(default)]
    pub open_hi: bool,
}

impl CoordinateRange {
    pub fn closed(lo: f64, hi: f64) -> Self {
        CoordinateRange {
            lo,
            hi,
            open_lo: false,
            open_hi: false,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        CoordinateRange {
            lo,
            hi,
            open_lo: true,
            open_hi: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::invalid("coordinate range must be finite"));
        }
        if self.lo < 0.0 {
            return Err(Error::invalid(format!(
                "range lo must be >= 0, got {}",
                self.lo
            )));
        }
        if self.lo >= self.hi {
            return Err(Error::invalid(format!(
                "range needs lo < hi, got ({}, {})",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    spacing: Spacing,
    quad_weights: Vec<f64>,
    range: CoordinateRange,
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = nodes[i + 1] - nodes[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

pub fn build_grid(range: CoordinateRange, n: usize, spacing: Spacing) -> Result<RadialGrid> {
    range.validate()?;
    if n < 3 {
        return Err(Error::invalid(format!("grid needs n >= 3, got {n}")));
    }
    if spacing == Spacing::Logarithmic && range.lo <= 0.0 {
        return Err(Error::invalid("logarithmic spacing needs lo > 0"));
    }
    let total = n + range.open_lo as usize + range.open_hi as usize;
    let (a, b) = match spacing {
        Spacing::Linear => (range.lo, range.hi),
        Spacing::Logarithmic => (range.lo.ln(), range.hi.ln()),
    };
    let step = (b - a) / (total - 1) as f64;
    let mut nodes: Vec<f64> = (0..total)
        .map(|i| {
            let xi = if i == total - 1 {
                b
            } else {
                a + step * i as f64
            };
            match spacing {
                Spacing::Linear => xi,
                Spacing::Logarithmic => xi.exp(),
            }
        })
        .collect();
    // pin the closed endpoints exactly
    nodes[0] = if spacing == Spacing::Linear {
        nodes[0]
    } else {
        range.lo
    };
    nodes[total - 1] = range.hi;
    if range.open_hi {
        nodes.pop();
    }
    if range.open_lo {
        nodes.remove(0);
    }
    RadialGrid::from_nodes(nodes, spacing, range)
}

impl RadialGrid {
    /// Builds a grid from an explicit strictly increasing node set.
    pub fn from_nodes(nodes: Vec<f64>, spacing: Spacing, range: CoordinateRange) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::invalid("grid needs at least 3 nodes"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("grid nodes must be strictly increasing"));
        }
        if spacing == Spacing::Logarithmic && nodes[0] <= 0.0 {
            return Err(Error::invalid("logarithmic grid needs positive nodes"));
        }
        let quad_weights = trapezoid_weights(&nodes);
        Ok(RadialGrid {
            nodes,
            spacing,
            quad_weights,
            range,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn range(&self) -> CoordinateRange {
        self.range
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Cell widths `x_{i+1} - x_i`.
    pub fn cell_widths(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Cell midpoints taken in the grid coordinate (geometric mean for
    /// logarithmic grids).
    pub fn cell_midpoints(&self) -> Vec<f64> {
        self.nodes
            .windows(2)
            .map(|w| midpoint(self.spacing, w[0], w[1]))
            .collect()
    }

    /// Maps a node to the grid coordinate in which it is equispaced.
    pub fn to_grid_coordinate(&self, t: f64) -> f64 {
        match self.spacing {
            Spacing::Linear => t,
            Spacing::Logarithmic => t.ln(),
        }
    }

    pub fn from_grid_coordinate(&self, xi: f64) -> f64 {
        match self.spacing {
            Spacing::Linear => xi,
            Spacing::Logarithmic => xi.exp(),
        }
    }

    /// Composite trapezoid sum of node-wise integrand values.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::invalid(format!(
                "integrand has {} values for {} nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        let mut acc = 0.0;
        for (i, (&w, &v)) in self.quad_weights.iter().zip(values).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: i,
                    t: self.nodes[i],
                });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let values: Vec<f64> = self.nodes.iter().map(|&t| f(t)).collect();
        self.integrate(&values)
    }

    /// Node-wise derivative: three-point second-order formulas on the
    /// nonuniform node set, one-sided at the two ends.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        let x = &self.nodes;
        let n = x.len();
        assert_eq!(values.len(), n, "derivative: length mismatch");
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            d[i] = -h1 / (h0 * (h0 + h1)) * values[i - 1]
                + (h1 - h0) / (h0 * h1) * values[i]
                + h0 / (h1 * (h0 + h1)) * values[i + 1];
        }
        let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
        d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * values[0] + (h0 + h1) / (h0 * h1) * values[1]
            - h0 / (h1 * (h0 + h1)) * values[2];
        let (h0, h1) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        d[n - 1] = h1 / (h0 * (h0 + h1)) * values[n - 3] - (h0 + h1) / (h0 * h1) * values[n - 2]
            + (2.0 * h1 + h0) / (h1 * (h0 + h1)) * values[n - 1];
        d
    }

    /// Dyadic refinement: inserts the grid-coordinate midpoint of every cell.
    pub fn refine(&self) -> RadialGrid {
        let mut nodes = Vec::with_capacity(2 * self.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(midpoint(self.spacing, w[0], w[1]));
        }
        nodes.push(self.hi());
        RadialGrid::from_nodes(nodes, self.spacing, self.range)
            .expect("refinement of a valid grid is valid")
    }
}

fn midpoint(spacing: Spacing, a: f64, b: f64) -> f64 {
    match spacing {
        Spacing::Linear => 0.5 * (a + b),
        Spacing::Logarithmic => (a * b).sqrt(),
    }
}

/// Values of a function sampled on a grid. With `dirichlet_zero` the function
/// is extended by zero outside the grid and vanishes at both end nodes.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    dirichlet_zero: bool,
}

impl GridFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, dirichlet_zero: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "grid function has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if dirichlet_zero && (values[0] != 0.0 || values[values.len() - 1] != 0.0) {
            return Err(Error::invalid(
                "dirichlet_zero function must vanish at both end nodes",
            ));
        }
        Ok(GridFunction {
            grid,
            values,
            dirichlet_zero,
        })
    }

    pub fn from_fn(
        grid: Arc<RadialGrid>,
        f: impl Fn(f64) -> f64,
        dirichlet_zero: bool,
    ) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&t| f(t)).collect();
        if dirichlet_zero {
            let n = values.len();
            values[0] = 0.0;
            values[n - 1] = 0.0;
        }
        GridFunction::new(grid, values, dirichlet_zero)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        GridFunction {
            grid,
            values: vec![0.0; n],
            dirichlet_zero: true,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dirichlet_zero(&self) -> bool {
        self.dirichlet_zero
    }

    pub fn scaled(&self, lambda: f64) -> GridFunction {
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| lambda * v).collect(),
            dirichlet_zero: self.dirichlet_zero,
        }
    }

    pub fn derivative(&self) -> Vec<f64> {
        self.grid.derivative(&self.values)
    }

    pub fn integrate(&self) -> Result<f64> {
        self.grid.integrate(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise-linear interpolation; zero outside the grid when
    /// `dirichlet_zero`, clamped to the end values otherwise.
    pub fn interpolate(&self, t: f64) -> f64 {
        interpolate_linear(self.grid.nodes(), &self.values, t, self.dirichlet_zero)
    }

    /// Two-column CSV `(node, value)` with a header row.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "node,value")?;
        for (t, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(out, "{t:.17e},{v:.17e}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(&mut file).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn interpolate_linear(nodes: &[f64], values: &[f64], t: f64, zero_outside: bool) -> f64 {
    let n = nodes.len();
    if t <= nodes[0] {
        return if t < nodes[0] && zero_outside {
            0.0
        } else {
            values[0]
        };
    }
    if t >= nodes[n - 1] {
        return if t > nodes[n - 1] && zero_outside {
            0.0
        } else {
            values[n - 1]
        };
    }
    let j = nodes.partition_point(|&x| x <= t);
    let (x0, x1) = (nodes[j - 1], nodes[j]);
    let w = (t - x0) / (x1 - x0);
    (1.0 - w) * values[j - 1] + w * values[j]
}
