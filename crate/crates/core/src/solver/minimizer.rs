//! Local minimizers inside the gradient-norm-bounded regions.

use rayon::prelude::*;

use super::flow::{gradient_flow, FlowConfig, FlowResult, FlowStatus};
use crate::error::{Error, Result};
use crate::functionals::{gn_constant, Coefficients, NormTuple, Objective};
use crate::params::{critical_exponent, ProblemParams};
use crate::radial::{GridSpec, RadialField, RadialGrid};
use crate::scalar::{sobolev_constant, thresholds, ThresholdSet};

pub const FLOW_CELLS: usize = 8192;
pub const FLOW_TOL: f64 = 1e-7;

/// Target `κR` for the decay rate `κ = √(λ/(a+bG))`.
const DECAY_SPAN: f64 = 35.0;
const MIN_DECAY_SPAN: f64 = 25.0;
const MAX_REGRIDS: usize = 4;

/// The region a local minimizer lives in.
#[derive(Clone, Debug)]
pub struct Region {
    /// Cap on `|∇u|₂²`.
    pub cap: f64,
    pub thresholds: ThresholdSet,
    pub near_degenerate: Vec<String>,
}

fn near(value: f64, edge: f64, what: &str, out: &mut Vec<String>) {
    if (value - edge).abs() <= 1e-3 * edge.abs().max(1e-300) {
        out.push(format!("{what} within 1e-3 of its boundary value {edge:e}"));
    }
}

/// Checks the hypotheses of the local-minimizer regimes and returns the cap:
/// `(ξ₀^{μ,1})²` for `N ≥ 5`, `k₀` for `N = 4`.
pub fn minimizer_region(params: &ProblemParams) -> Result<Region> {
    params.validate()?;
    let p = params;
    if !(p.mu > 0.0) {
        return Err(Error::Regime(format!("local minimizers need mu > 0, got {}", p.mu)));
    }
    let cq = gn_constant(p.n, p.q)?;
    let t = thresholds(p, Some(cq))?;
    let mut stamps = Vec::new();
    if p.n >= 5 {
        if !(p.b > t.b1 && p.b < t.b0) {
            return Err(Error::Regime(format!("need b1 < b < b0 ({:e} < b < {:e}), got b = {:e}", t.b1, t.b0, p.b)));
        }
        let qmax = 2.0 + 4.0 / p.n as f64;
        if !(p.q < qmax) {
            return Err(Error::Regime(format!("need q < 2 + 4/N = {qmax}, got {}", p.q)));
        }
        let Some(z) = t.xi0_mu1 else {
            return Err(Error::Regime(format!(
                "mu c^(q(1-delta)/2) = {:e} exceeds the sufficient bound: {}",
                p.mu * p.c.powf(p.mass_exponent()),
                t.notes.join("; ")
            )));
        };
        near(p.b, t.b1, "b", &mut stamps);
        near(p.b, t.b0, "b", &mut stamps);
        near(p.q, qmax, "q", &mut stamps);
        Ok(Region { cap: z * z, thresholds: t, near_degenerate: stamps })
    } else {
        let s = sobolev_constant(4);
        if !(p.b > 0.0 && p.b * s * s < 1.0) {
            return Err(Error::Regime(format!("need 0 < b < S^-2 = {:e}, got b = {:e}", 1.0 / (s * s), p.b)));
        }
        if !(p.q < 3.0) {
            return Err(Error::Regime(format!("need q < 3, got {}", p.q)));
        }
        let (Some(k0), Some(c0)) = (t.k0, t.c0) else {
            return Err(Error::Regime(format!("k0 and c0 unavailable: {}", t.notes.join("; "))));
        };
        if !(p.c < c0) {
            return Err(Error::Regime(format!("need c < c0 = {c0:e}, got c = {:e}", p.c)));
        }
        near(p.q, 3.0, "q", &mut stamps);
        near(p.c, c0, "c", &mut stamps);
        Ok(Region { cap: k0, thresholds: t, near_degenerate: stamps })
    }
}

/// Gaussian of mass `c` with `|∇u|₂² = target`.
pub fn gaussian_start(grid: &std::sync::Arc<RadialGrid>, c: f64, target: f64) -> Result<RadialField> {
    let l2 = grid.dim() as f64 * c / (2.0 * target);
    RadialField::from_fn(grid, |r| (-r * r / (2.0 * l2)).exp()).project_mass(c)
}

/// Exact norm tuple of the Gaussian of mass `c` with `|∇u|₂² = grad2`.
pub fn gaussian_tuple(n: u32, c: f64, q: f64, grad2: f64) -> NormTuple {
    let nf = n as f64;
    let l2 = nf * c / (2.0 * grad2);
    let amp2 = c / (std::f64::consts::PI * l2).powf(nf / 2.0);
    let power = |p: f64| amp2.powf(p / 2.0) * (2.0 * std::f64::consts::PI * l2 / p).powf(nf / 2.0);
    NormTuple::new(grad2, c, power(q), power(critical_exponent(n)))
}

/// `|∇u|₂²` of the Gaussian dilation with the lowest objective below `cap/2`,
/// or `cap/10` when that lowest value is not negative.
pub fn start_grad2(params: &ProblemParams, objective: Objective, cap: f64) -> Result<f64> {
    let k = Coefficients::of(objective, params)?;
    let (mut best, mut arg) = (0.0, 0.1 * cap);
    for i in 0..=400 {
        let g = 0.5 * cap * 10f64.powf(-8.0 * i as f64 / 400.0);
        let e = k.energy(&gaussian_tuple(params.n, params.c, params.q, g));
        if e < best {
            best = e;
            arg = g;
        }
    }
    Ok(arg)
}

/// Runs the flow and re-grids until the computed decay rate is resolved by the domain.
pub fn flow_adaptive(
    params: &ProblemParams,
    config: &FlowConfig,
    cells: usize,
    start_grad2: f64,
) -> Result<FlowResult> {
    let k = Coefficients::of(config.objective, params)?;
    let n = params.n as f64;
    let mut width = (n * params.c / (2.0 * start_grad2)).sqrt();
    let grid = RadialGrid::new(GridSpec::new(params.n, cells, 12.0 * width, width))?;
    let mut init = gaussian_start(&grid, params.c, start_grad2)?;
    let mut last = None;
    for _ in 0..=MAX_REGRIDS {
        let res = gradient_flow(&init, params, config)?;
        if res.status != FlowStatus::Converged || res.multiplier <= 0.0 {
            return Ok(res);
        }
        let kappa = (res.multiplier / (k.a + k.b * res.tuple.grad2)).sqrt();
        let r_max = res.field.grid.r_max();
        if kappa * r_max >= MIN_DECAY_SPAN {
            return Ok(res);
        }
        width = (n * params.c / (2.0 * res.tuple.grad2)).sqrt();
        let spec = GridSpec::new(params.n, cells, (DECAY_SPAN / kappa).max(12.0 * width), width);
        init = res.field.resample(&RadialGrid::new(spec)?);
        last = Some(res);
    }
    let mut res = last.ok_or_else(|| Error::Convergence("regridding loop did not run".into()))?;
    res.status = FlowStatus::Stalled;
    res.message = Some(format!("domain-bound: decay length grows with R_max = {:e}", res.field.grid.r_max()));
    Ok(res)
}

/// Local minimizer of `I` (or `J`) in its region, started from the best Gaussian
/// dilation inside the region. Fails unless the flow converges to negative energy with
/// a positive multiplier.
pub fn local_minimizer(params: &ProblemParams, objective: Objective) -> Result<FlowResult> {
    local_minimizer_on(params, objective, FLOW_CELLS)
}

pub fn local_minimizer_on(params: &ProblemParams, objective: Objective, cells: usize) -> Result<FlowResult> {
    let region = minimizer_region(params)?;
    let config = FlowConfig { region_cap: Some(region.cap), residual_tol: FLOW_TOL, objective, ..Default::default() };
    let start = start_grad2(params, objective, region.cap)?;
    let mut res = flow_adaptive(params, &config, cells, start)?;
    res.near_degenerate = region.near_degenerate;
    match res.status {
        FlowStatus::Converged => {}
        _ => {
            return Err(Error::Convergence(format!(
                "{:?}: {}",
                res.status,
                res.message.clone().unwrap_or_default()
            )))
        }
    }
    if !(res.energy < 0.0 && res.multiplier > 0.0) {
        return Err(Error::Regime(format!(
            "minimizer has energy {:e} and multiplier {:e}; expected negative and positive",
            res.energy, res.multiplier
        )));
    }
    Ok(res)
}

/// Local minimizers along a list of `μ` values, computed concurrently.
pub fn mu_sweep(params: &ProblemParams, mus: &[f64]) -> Vec<Result<FlowResult>> {
    mus.par_iter().map(|&mu| local_minimizer(&params.with_mu(mu), Objective::I)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{b0, b1};

    fn n5(x: f64) -> ProblemParams {
        let c = 0.01f64;
        let b = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
        ProblemParams::new(5, 1.0, b, x / c.powf(0.625), 2.5, c).unwrap()
    }

    fn n4(c_frac: f64) -> ProblemParams {
        let s = sobolev_constant(4);
        let p = ProblemParams::new(4, 1.0, 0.5 / (s * s), 1.0, 2.5, 1.0).unwrap();
        let c0 = minimizer_region(&p).unwrap().thresholds.c0.unwrap();
        p.with_c(c_frac * c0)
    }

    #[test]
    fn gaussian_tuple_matches_the_grid() {
        let g = 0.3;
        let t = gaussian_tuple(5, 2.0, 2.5, g);
        let grid = RadialGrid::new(GridSpec::new(5, 8192, 60.0, 2.0)).unwrap();
        let d = gaussian_start(&grid, 2.0, g).unwrap().norm_tuple(2.5);
        for (a, b) in [(t.grad2, d.grad2), (t.mass2, d.mass2), (t.lq, d.lq), (t.l2star, d.l2star)] {
            assert!((a - b).abs() < 1e-6 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn region_hypotheses() {
        let p = n5(1.0);
        assert!(minimizer_region(&p).unwrap().cap > 0.0);
        assert!(matches!(minimizer_region(&p.with_mu(0.0)), Err(Error::Regime(_))));
        assert!(matches!(minimizer_region(&p.with_b(0.5 * b1(5, 1.0))), Err(Error::Regime(_))));
        assert!(matches!(minimizer_region(&p.with_q(3.0)), Err(Error::Regime(_))));
        assert!(matches!(minimizer_region(&n5(50.0)), Err(Error::Regime(_))));
        assert!(matches!(minimizer_region(&n4(1.1)), Err(Error::Regime(_))));
        assert!(minimizer_region(&n4(0.9995)).unwrap().near_degenerate.iter().any(|s| s.starts_with('c')));
    }

    #[test]
    fn n5_minimizer_is_negative_and_positive() {
        let r = local_minimizer(&n5(1.0), Objective::I).unwrap();
        assert!(r.energy < 0.0 && r.multiplier > 0.0 && r.is_positive());
        assert!(r.pohozaev_certificate() && r.multiplier_gap() < 1e-6);
    }

    #[test]
    fn n4_minimizers_for_both_objectives() {
        let p = n4(0.5);
        let cap = minimizer_region(&p).unwrap().cap;
        let i = local_minimizer(&p, Objective::I).unwrap();
        let j = local_minimizer(&p, Objective::J).unwrap();
        assert!(i.tuple.grad2 < cap && j.tuple.grad2 < cap);
        assert!(j.energy >= j.energy_i);
        assert!(i.energy <= j.energy_i);
        assert!(j.pohozaev_certificate() && j.multiplier_gap() < 1e-6);
        assert!(matches!(local_minimizer(&n5(1.0), Objective::J), Err(Error::Regime(_))));
    }
}
