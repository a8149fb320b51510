//! Radial fields on a graded grid over `[0, R_max]`.
//!
//! Fields are nodal values of a continuous piecewise-linear function. Gradient
//! energies are exact for that interpolant; zeroth-order integrals use lumped nodal
//! weights `wᵢ = ω_N∫φᵢ(r)r^{N-1}dr`, which keeps the mass matrix diagonal and the
//! discrete maximum principle intact.

mod families;
mod interp;
mod io;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::NormTuple;
use crate::params::{critical_exponent, sphere_area};
use crate::quad;

pub use families::{
    bubble, bubble_derivative, bubble_mass_unit, epsilon_for_mass, make_bubble, make_truncated_bubble,
    truncated_bubble, truncated_bubble_derivative, truncated_bubble_norms, TruncatedNorms,
};
pub use interp::Pchip;
pub use io::FieldSnapshot;

/// Nodes follow `r(x) = core·(e^{κx} − 1)`, `x = i/n_cells`, `κ = ln(1 + R_max/core)`:
/// uniform spacing `≈ core·κ/n_cells` near the origin, geometric growth beyond `core`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub n: u32,
    pub n_cells: usize,
    pub r_max: f64,
    pub core: f64,
}

pub const DEFAULT_CELLS: usize = 16384;

/// Relative tail budget for the bubble norms beyond `R_max`.
const TAIL_BUDGET: f64 = 1e-8;

impl GridSpec {
    pub fn new(n: u32, n_cells: usize, r_max: f64, core: f64) -> Self {
        Self { n, n_cells, r_max, core }
    }

    /// Grid whose `R_max` leaves every bubble norm tail below `1e-8` of its total
    /// (the mass tail is skipped for `N = 4`, where it diverges).
    pub fn for_bubble(n: u32, eps: f64, n_cells: usize) -> Self {
        let nf = n as f64;
        let omega = sphere_area(n);
        let amp2 = (nf * (nf - 2.0)).powf((nf - 2.0) / 2.0);
        let total = crate::scalar::sobolev_constant(n).powf(nf / 2.0);
        let r_grad = ((nf - 2.0) * amp2 * omega / (total * TAIL_BUDGET)).powf(1.0 / (nf - 2.0));
        let ts = critical_exponent(n);
        let r_crit = (amp2.powf(ts / 2.0) * omega / (nf * total * TAIL_BUDGET)).powf(1.0 / nf);
        let mut r = r_grad.max(r_crit);
        if n >= 5 {
            let m1 = bubble_mass_unit(n).expect("N >= 5");
            r = r.max((amp2 * omega / ((nf - 4.0) * m1 * TAIL_BUDGET)).powf(1.0 / (nf - 4.0)));
        }
        Self::new(n, n_cells, r * eps.sqrt(), eps.sqrt())
    }

    /// Same mapping with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self { n_cells: self.n_cells * factor, ..*self }
    }

    pub fn signature(&self) -> String {
        format!("N={};cells={};r_max={:e};core={:e}", self.n, self.n_cells, self.r_max, self.core)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n_cells < 2 || !(self.r_max > 0.0) || !(self.core > 0.0) || !self.r_max.is_finite() {
            return Err(Error::InvalidParams(format!("invalid grid spec {}", self.signature())));
        }
        Ok(())
    }
}

/// Immutable radial grid with quadrature data.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    n: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cell_moments: Vec<f64>,
    spec: Option<GridSpec>,
}

impl RadialGrid {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let m = spec.n_cells;
        let kappa = (spec.r_max / spec.core).ln_1p();
        let mut nodes: Vec<f64> = (0..=m).map(|i| spec.core * (kappa * i as f64 / m as f64).exp_m1()).collect();
        nodes[0] = 0.0;
        nodes[m] = spec.r_max;
        let mut g = Self::build(spec.n, nodes)?;
        g.spec = Some(spec);
        Ok(Arc::new(g))
    }

    /// Grid from explicit nodes (used on import).
    pub fn from_nodes(n: u32, nodes: Vec<f64>) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::build(n, nodes)?))
    }

    fn build(n: u32, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != 0.0 {
            return Err(Error::Format("grid needs at least three nodes starting at r = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Format("grid nodes must be finite and strictly increasing".into()));
        }
        let omega = sphere_area(n);
        let nf = n as f64;
        let mut weights = vec![0.0; nodes.len()];
        let mut cell_moments = Vec::with_capacity(nodes.len() - 1);
        for (j, w) in nodes.windows(2).enumerate() {
            let (lo, hi) = (w[0], w[1]);
            let h = hi - lo;
            let left = quad::panel(&|r: f64| (hi - r) / h * r.powf(nf - 1.0), lo, hi);
            let right = quad::panel(&|r: f64| (r - lo) / h * r.powf(nf - 1.0), lo, hi);
            weights[j] += omega * left;
            weights[j + 1] += omega * right;
            cell_moments.push(omega * (left + right));
        }
        Ok(Self { n, nodes, weights, cell_moments, spec: None })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lumped weights `ω_N∫φᵢr^{N-1}dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `ω_N∫_{cell} r^{N-1}dr` per cell.
    pub fn cell_moments(&self) -> &[f64] {
        &self.cell_moments
    }

    pub fn spec(&self) -> Option<GridSpec> {
        self.spec
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn signature(&self) -> String {
        match self.spec {
            Some(s) => s.signature(),
            None => format!("N={};nodes={};r_max={:e}", self.n, self.nodes.len(), self.r_max()),
        }
    }

    /// `ω_N∫₀^{R_max} f(r)r^{N-1}dr` by the 8-point rule on every cell.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let omega = sphere_area(self.n);
        let e = self.n as f64 - 1.0;
        omega * self.nodes.windows(2).map(|w| quad::panel(&|r: f64| f(r) * r.powf(e), w[0], w[1])).sum::<f64>()
    }

    /// `Σ wᵢ|uᵢ|^p`.
    pub fn lumped_power(&self, u: &[f64], p: f64) -> f64 {
        if p == 2.0 {
            return self.weights.iter().zip(u).map(|(w, v)| w * v * v).sum();
        }
        self.weights.iter().zip(u).map(|(w, v)| w * v.abs().powf(p)).sum()
    }

    /// Exact `|∇u_h|₂²` of the piecewise-linear interpolant.
    pub fn grad2(&self, u: &[f64]) -> f64 {
        self.nodes
            .windows(2)
            .zip(u.windows(2))
            .zip(&self.cell_moments)
            .map(|((r, v), m)| {
                let d = (v[1] - v[0]) / (r[1] - r[0]);
                m * d * d
            })
            .sum()
    }

    /// `K u`, half the gradient of `grad2`.
    pub fn stiffness_apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for j in 0..self.cell_moments.len() {
            let h = self.nodes[j + 1] - self.nodes[j];
            let flux = self.cell_moments[j] * (u[j + 1] - u[j]) / (h * h);
            out[j] -= flux;
            out[j + 1] += flux;
        }
        out
    }

    /// Tridiagonal bands `(diag, off)` of `αK + βW`; `off[j]` couples nodes `j, j+1`.
    pub fn operator_bands(&self, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
        let mut diag: Vec<f64> = self.weights.iter().map(|w| beta * w).collect();
        let mut off = vec![0.0; self.cell_moments.len()];
        for j in 0..self.cell_moments.len() {
            let h = self.nodes[j + 1] - self.nodes[j];
            let k = alpha * self.cell_moments[j] / (h * h);
            diag[j] += k;
            diag[j + 1] += k;
            off[j] = -k;
        }
        (diag, off)
    }
}

/// Solves a symmetric tridiagonal system (Thomas algorithm).
pub fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { off[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / den;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / den;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Nodal samples of a radial function.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("field values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid: Arc::clone(grid), values }
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        Self { grid: Arc::clone(grid), values: vec![0.0; grid.len()] }
    }

    pub fn norm_tuple(&self, q: f64) -> NormTuple {
        let g = &self.grid;
        NormTuple {
            grad2: g.grad2(&self.values),
            mass2: g.lumped_power(&self.values, 2.0),
            lq: g.lumped_power(&self.values, q),
            l2star: g.lumped_power(&self.values, critical_exponent(g.dim())),
        }
    }

    pub fn mass(&self) -> f64 {
        self.grid.lumped_power(&self.values, 2.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest node radius where `|u| > 1e-12·max|u|`.
    pub fn support_radius(&self) -> f64 {
        let thr = 1e-12 * self.max_abs();
        let nodes = self.grid.nodes();
        self.values.iter().rposition(|v| v.abs() > thr).map(|i| nodes[i]).unwrap_or(0.0)
    }

    /// Monotone-cubic interpolant evaluated at `r`; zero beyond `R_max`.
    pub fn sample(&self, r: f64) -> f64 {
        Pchip::new(self.grid.nodes(), &self.values).eval(r)
    }

    /// `(s∗u)(r) = e^{Ns/2}u(e^s r)` resampled on the same grid.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if s == 0.0 {
            return Ok(self.clone());
        }
        let r_max = self.grid.r_max();
        let needed = self.support_radius() * (-s).exp();
        if needed > r_max * (1.0 + 1e-12) {
            return Err(Error::SupportOverflow { needed, r_max });
        }
        let interp = Pchip::new(self.grid.nodes(), &self.values);
        let (es, amp) = (s.exp(), (self.grid.dim() as f64 * s / 2.0).exp());
        let mut values: Vec<f64> = self.grid.nodes().iter().map(|&r| amp * interp.eval(es * r)).collect();
        *values.last_mut().expect("nonempty") = 0.0;
        Ok(Self { grid: Arc::clone(&self.grid), values })
    }

    /// Second-order finite-difference `u'' + (N-1)u'/r`, with `Δu(0) = 2N(u₁-u₀)/r₁²`
    /// from the symmetric extension and `u = 0` imposed at `R_max`.
    pub fn laplacian(&self) -> Self {
        let r = self.grid.nodes();
        let u = &self.values;
        let m = r.len() - 1;
        let nf = self.grid.dim() as f64;
        let mut out = vec![0.0; r.len()];
        out[0] = 2.0 * nf * (u[1] - u[0]) / (r[1] * r[1]);
        for i in 1..m {
            let (hm, hp) = (r[i] - r[i - 1], r[i + 1] - r[i]);
            let up = if i + 1 == m { 0.0 } else { u[i + 1] };
            let d2 = 2.0 * ((up - u[i]) / hp - (u[i] - u[i - 1]) / hm) / (hp + hm);
            let d1 = (hm * hm * up - hp * hp * u[i - 1] + (hp * hp - hm * hm) * u[i]) / (hp * hm * (hp + hm));
            out[i] = d2 + (nf - 1.0) * d1 / r[i];
        }
        Self { grid: Arc::clone(&self.grid), values: out }
    }

    /// `√(c/|u|₂²)·u`.
    pub fn project_mass(&self, c: f64) -> Result<Self> {
        let m = self.mass();
        if m == 0.0 {
            return Err(Error::ZeroField);
        }
        let k = (c / m).sqrt();
        Ok(Self { grid: Arc::clone(&self.grid), values: self.values.iter().map(|v| v * k).collect() })
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { grid: Arc::clone(&self.grid), values: self.values.iter().map(|v| v * k).collect() }
    }

    pub fn axpy(&self, k: f64, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + k * b).collect();
        Self { grid: Arc::clone(&self.grid), values }
    }

    /// Field re-sampled onto another grid by the monotone cubic.
    pub fn resample(&self, grid: &Arc<RadialGrid>) -> Self {
        let interp = Pchip::new(self.grid.nodes(), &self.values);
        let mut values: Vec<f64> = grid.nodes().iter().map(|&r| interp.eval(r)).collect();
        *values.last_mut().expect("nonempty") = 0.0;
        Self { grid: Arc::clone(grid), values }
    }
}

/// Four integrals of `u` with subcritical exponent `q`.
pub fn norm_tuple(u: &RadialField, q: f64) -> NormTuple {
    u.norm_tuple(q)
}

pub fn dilate(u: &RadialField, s: f64) -> Result<RadialField> {
    u.dilate(s)
}

pub fn laplacian_apply(u: &RadialField) -> RadialField {
    u.laplacian()
}

pub fn project_mass(u: &RadialField, c: f64) -> Result<RadialField> {
    u.project_mass(c)
}
