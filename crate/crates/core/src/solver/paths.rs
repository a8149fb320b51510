//! Explicit mountain-pass paths and the resulting level bounds.

use serde::{Deserialize, Serialize};

use super::flow::{FlowResult, FlowStatus};
use crate::error::{Error, Result};
use crate::functionals::{energy_i, fiber_project, gn_constant, Coefficients, NormTuple, Objective, RootClass};
use crate::params::ProblemParams;
use crate::quad;
use crate::radial::{bubble, epsilon_for_mass, truncated_bubble, GridSpec, RadialField, RadialGrid};
use crate::scalar::{sobolev_constant, thresholds, Landscape};

pub const PATH_SAMPLES: usize = 400;
pub const W_PATH_CELLS: usize = 32768;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    /// Dilations of the bubble between `u_{s₀}` and `φ₊`.
    DilationMu0,
    /// `W_{n,t} = τ[ū(τx) + tU_n(τx)]`.
    BubbleOnMinimizer,
    /// A single point.
    Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdComparison {
    /// `m̄(c) = J(ū)`.
    pub m_bar: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub threshold: f64,
    /// `threshold − sup`.
    pub margin: f64,
    /// `sup_t J(W_{n,t})`.
    pub sup_j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub kind: PathKind,
    pub params: ProblemParams,
    /// `(t, I(γ(t)))`.
    pub levels: Vec<(f64, f64)>,
    /// `|∇γ(t)|₂` at every sample.
    pub grad_norms: Vec<f64>,
    pub sup_level: f64,
    pub argmax_t: f64,
    pub endpoints: (f64, f64),
    pub comparison: Option<ThresholdComparison>,
    /// Change of `sup_level` when the quadrature grid is halved.
    pub quadrature_error: Option<f64>,
    pub n: Option<u32>,
    pub grid_signature: Option<String>,
    pub notes: Vec<String>,
}

impl PathReport {
    pub fn point(params: ProblemParams, level: f64) -> Self {
        Self {
            kind: PathKind::Point,
            params,
            levels: vec![(0.0, level)],
            grad_norms: vec![],
            sup_level: level,
            argmax_t: 0.0,
            endpoints: (level, level),
            comparison: None,
            quadrature_error: None,
            n: None,
            grid_signature: None,
            notes: vec![],
        }
    }

    pub fn levels_csv(&self) -> String {
        let mut out = String::from("t,level\n");
        for (t, l) in &self.levels {
            out.push_str(&format!("{t:e},{l:e}\n"));
        }
        out
    }
}

/// Golden-section refinement of a sampled maximum of `f` on `[lo, hi]`.
fn refine_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn sampled_sup<F: Fn(f64) -> f64>(f: &F, ts: &[f64]) -> (Vec<(f64, f64)>, f64, f64) {
    let levels: Vec<(f64, f64)> = ts.iter().map(|&t| (t, f(t))).collect();
    let (i, _) = levels.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &(_, v))| {
        if v > bv {
            (i, v)
        } else {
            (bi, bv)
        }
    });
    let lo = ts[i.saturating_sub(1)];
    let hi = ts[(i + 1).min(ts.len() - 1)];
    let (t, v) = refine_max(f, lo, hi);
    let (t, v) = if v >= levels[i].1 { (t, v) } else { levels[i] };
    (levels, v, t)
}

/// Norm tuple of the bubble with `|U|₂² = c` (`N ≥ 5`).
pub fn bubble_tuple(n: u32, q: f64, c: f64) -> Result<NormTuple> {
    let eps = epsilon_for_mass(n, c)?;
    let nf = n as f64;
    let s = sobolev_constant(n).powf(nf / 2.0);
    let r_max = 1e8 * eps.sqrt();
    let lq = crate::params::sphere_area(n)
        * quad::integrate_radial(|r| bubble(n, eps, r).powf(q) * r.powf(nf - 1.0), eps.sqrt(), r_max);
    Ok(NormTuple::new(s, c, lq, s))
}

/// Path `γ₁(t) = u_{r(t)}`, `r(t) = ts₊ + (1−t)s₀`, along dilations of the bubble with `μ = 0`.
pub fn mp_path_mu0(params: &ProblemParams, n_samples: usize) -> Result<PathReport> {
    params.validate()?;
    let p = params;
    let t = thresholds(p, None)?;
    if p.n < 5 || p.mu != 0.0 || !(p.b > 0.0 && p.b < t.b0) {
        return Err(Error::Regime("the dilation path needs N >= 5, mu = 0 and 0 < b < b0".into()));
    }
    let u = bubble_tuple(p.n, p.q, p.c)?;
    let fiber = fiber_project(&u, p)?;
    let minus = fiber.roots.iter().find(|r| r.class == RootClass::Minus);
    let plus = fiber.roots.iter().find(|r| r.class == RootClass::Plus);
    let (Some(minus), Some(plus)) = (minus, plus) else {
        return Err(Error::NoRootFound("fiber of the bubble lacks a minus/plus pair".into()));
    };
    let level = |s: f64| energy_i(&u.dilated(s, p), p);
    let mut s0 = minus.s - 0.5;
    while level(s0) >= 0.5 * minus.psi {
        s0 -= 0.5;
    }
    let s1 = plus.s;
    let at = |t: f64| level(t * s1 + (1.0 - t) * s0);
    let ts: Vec<f64> = (0..n_samples.max(2)).map(|i| i as f64 / (n_samples.max(2) - 1) as f64).collect();
    let (levels, sup, argmax) = sampled_sup(&at, &ts);
    let grad_norms = ts.iter().map(|&t| u.dilated(t * s1 + (1.0 - t) * s0, p).grad2.sqrt()).collect();
    Ok(PathReport {
        kind: PathKind::DilationMu0,
        params: *p,
        endpoints: (at(0.0), at(1.0)),
        levels,
        grad_norms,
        sup_level: sup,
        argmax_t: argmax,
        comparison: None,
        quadrature_error: None,
        n: None,
        grid_signature: None,
        notes: vec![format!("s0 = {s0}, s_minus = {}, s_plus = {s1}", minus.s)],
    })
}

/// `ū` and `U_n` sampled on one grid fine enough for both.
struct Superposition {
    grid: std::sync::Arc<RadialGrid>,
    ubar: Vec<f64>,
    bump: Vec<f64>,
}

impl Superposition {
    fn new(ubar: &RadialField, n: u32, cells: usize) -> Result<Self> {
        let spec = GridSpec::new(4, cells, ubar.grid.r_max().max(2.0), 0.2 / n as f64);
        let grid = RadialGrid::new(spec)?;
        let u = ubar.resample(&grid).values;
        let bump = grid.nodes().iter().map(|&r| truncated_bubble(n, r)).collect();
        Ok(Self { grid, ubar: u, bump })
    }

    /// Tuple of `W_{n,t}` with `τ² = |ū + tU_n|₂²/c`.
    fn tuple(&self, t: f64, p: &ProblemParams) -> (NormTuple, f64) {
        let v: Vec<f64> = self.ubar.iter().zip(&self.bump).map(|(a, b)| a + t * b).collect();
        let g = &self.grid;
        let m = g.lumped_power(&v, 2.0);
        let tau = (m / p.c).sqrt();
        let tuple = NormTuple {
            grad2: g.grad2(&v),
            mass2: m / (tau * tau),
            lq: g.lumped_power(&v, p.q) * tau.powf(p.q - 4.0),
            l2star: g.lumped_power(&v, 4.0),
        };
        (tuple, tau)
    }
}

/// Evaluates `I` along `W_{n,t}` for `t ∈ [0, t̄]`, where `t̄` is doubled from
/// `2t_*` until `I(W_{n,t̄}) < 2m(c)`, and compares the sup with `m̄(c) + Λ`.
pub fn mp_path_w(params: &ProblemParams, ubar: &FlowResult, m_c: f64, n: u32) -> Result<PathReport> {
    let p = params;
    if p.n != 4 {
        return Err(Error::Regime("the bubble path is built in dimension 4 only".into()));
    }
    if ubar.config.objective != Objective::J || ubar.status != FlowStatus::Converged || !(ubar.energy < 0.0) {
        return Err(Error::Regime("the bubble path needs a converged J-minimizer with negative energy".into()));
    }
    if !(m_c < 0.0) {
        return Err(Error::Regime(format!("need m(c) < 0, got {m_c:e}")));
    }
    let s2 = sobolev_constant(4).powi(2);
    let one = 1.0 - p.b * s2;
    let lambda = p.a * p.a * s2 / (4.0 * one);
    let kj = Coefficients::of(Objective::J, p)?;
    let run = |cells: usize| -> Result<(PathReport, f64)> {
        let sp = Superposition::new(&ubar.field, n, cells)?;
        let eval = |t: f64| -> Result<(f64, f64, f64)> {
            let (w, _) = sp.tuple(t, p);
            if (w.mass2 - p.c).abs() > 1e-10 * p.c {
                return Err(Error::MassMismatch { mass: w.mass2, c: p.c });
            }
            Ok((energy_i(&w, p), kj.energy(&w), w.grad2.sqrt()))
        };
        let (ubar_fine, _) = sp.tuple(0.0, p);
        let m_bar = kj.energy(&ubar_fine);
        let t_star = ((p.a + p.b * ubar_fine.grad2) / one).sqrt();
        let mut t_bar = 2.0 * t_star;
        while eval(t_bar)?.0 >= 2.0 * m_c {
            t_bar *= 2.0;
            if t_bar > 1e6 * t_star {
                return Err(Error::Convergence("no path endpoint below 2m(c)".into()));
            }
        }
        let ts: Vec<f64> = (0..PATH_SAMPLES).map(|i| t_bar * i as f64 / (PATH_SAMPLES - 1) as f64).collect();
        let level = |t: f64| eval(t).map(|v| v.0).unwrap_or(f64::NAN);
        let level_j = |t: f64| eval(t).map(|v| v.1).unwrap_or(f64::NAN);
        for &t in &ts {
            eval(t)?;
        }
        let (levels, sup, argmax) = sampled_sup(&level, &ts);
        let (_, sup_j, _) = sampled_sup(&level_j, &ts);
        let grad_norms = ts.iter().map(|&t| eval(t).map(|v| v.2)).collect::<Result<Vec<_>>>()?;
        let threshold = m_bar + lambda;
        let report = PathReport {
            kind: PathKind::BubbleOnMinimizer,
            params: *p,
            endpoints: (levels[0].1, levels[levels.len() - 1].1),
            levels,
            grad_norms,
            sup_level: sup,
            argmax_t: argmax,
            comparison: Some(ThresholdComparison { m_bar, lambda, threshold, margin: threshold - sup, sup_j }),
            quadrature_error: None,
            n: Some(n),
            grid_signature: Some(sp.grid.signature()),
            notes: vec![
                format!("t_star = {t_star}, t_bar = {t_bar}, flow m_bar = {}", ubar.energy),
                "conjecture: a critical point near the path maximum approximates the mountain-pass solution (not verified)".into(),
            ],
        };
        Ok((report, sup))
    };
    let (mut report, sup) = run(W_PATH_CELLS)?;
    let (_, coarse) = run(W_PATH_CELLS / 2)?;
    report.quadrature_error = Some((sup - coarse).abs());
    Ok(report)
}

/// `W`-paths over several `n`, keeping the lowest sup.
pub fn best_w_path(params: &ProblemParams, ubar: &FlowResult, m_c: f64, ns: &[u32]) -> Result<PathReport> {
    use rayon::prelude::*;
    let reports: Vec<Result<PathReport>> = ns.par_iter().map(|&n| mp_path_w(params, ubar, m_c, n)).collect();
    let mut best: Option<PathReport> = None;
    let mut errors = Vec::new();
    for r in reports {
        match r {
            Ok(r) => {
                if best.as_ref().map_or(true, |b| r.sup_level < b.sup_level) {
                    best = Some(r);
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    let mut best = best.ok_or_else(|| Error::Convergence(format!("no valid W-path: {}", errors.join("; "))))?;
    best.notes.extend(errors);
    Ok(best)
}

/// Bounds on the mountain-pass level: the lowest path sup from above, the
/// barrier on `∂A_{k₀}(c)` from below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub upper: f64,
    /// `k₀·f_c(k₀)`, a lower bound of `I` on `∂A_{k₀}(c)` (N = 4).
    pub barrier: Option<f64>,
    pub paths: usize,
}

/// `k₀·f_c(k₀)`: on `|∇u|₂² = k` with mass `c`, `I(u) ≥ k·f_c(k)`.
pub fn region_barrier(params: &ProblemParams) -> Result<f64> {
    let cq = gn_constant(4, params.q)?;
    let t = thresholds(params, Some(cq))?;
    let k0 = t.k0.ok_or_else(|| Error::Regime(format!("k0 unavailable: {}", t.notes.join("; "))))?;
    let fc = Landscape::new(*params, Some(cq)).fc_poly(params.c)?;
    Ok(k0 * fc.eval(k0))
}

pub fn mp_level_estimate(params: &ProblemParams, paths: &[PathReport]) -> Result<LevelEstimate> {
    let upper = paths
        .iter()
        .map(|p| p.sup_level)
        .fold(f64::INFINITY, f64::min);
    if paths.is_empty() {
        return Err(Error::InvalidParams("at least one path is required".into()));
    }
    let barrier = if params.n == 4 && params.mu > 0.0 { region_barrier(params).ok() } else { None };
    Ok(LevelEstimate { upper, barrier, paths: paths.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{b0, b1};

    #[test]
    fn golden_refinement_finds_the_peak() {
        let (t, v) = refine_max(|x| 1.0 - (x - 0.3).powi(2), 0.0, 1.0);
        assert!((t - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dilation_path_reaches_the_minus_level() {
        let b = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
        let p = ProblemParams::new(5, 1.0, b, 0.0, 2.5, 1.0).unwrap();
        let th = thresholds(&p, None).unwrap();
        let r = mp_path_mu0(&p, 200).unwrap();
        let cm = th.c_n_minus.unwrap();
        assert!((r.sup_level - cm).abs() < 1e-9 * cm);
        assert!((r.endpoints.1 - th.c_n_plus.unwrap()).abs() < 1e-9 * cm);
        assert!(r.endpoints.0 < cm);
        let xm = th.xi_minus.unwrap();
        let (lo, hi) = r.grad_norms.iter().fold((f64::MAX, 0.0f64), |(l, h), &g| (l.min(g), h.max(g)));
        assert!(lo < xm && xm < hi);
        assert!(mp_path_mu0(&p.with_mu(0.1), 10).is_err());
        assert!(mp_path_mu0(&p.with_b(2.0 * b0(5, 1.0)), 10).is_err());
    }

    #[test]
    fn level_estimate_of_a_point_is_its_level() {
        let p = ProblemParams::new(5, 1.0, 1e-3, 0.0, 2.5, 1.0).unwrap();
        let e = mp_level_estimate(&p, &[PathReport::point(p, 0.25)]).unwrap();
        assert_eq!(e.upper, 0.25);
        assert!(e.barrier.is_none());
        assert!(mp_level_estimate(&p, &[]).is_err());
    }

    #[test]
    fn w_path_requires_a_j_minimizer() {
        let s = sobolev_constant(4);
        let p = ProblemParams::new(4, 1.0, 0.5 / (s * s), 1.0, 2.5, 10.0).unwrap();
        let i = crate::solver::local_minimizer(&p, Objective::I).unwrap();
        assert!(matches!(mp_path_w(&p, &i, i.energy, 20), Err(Error::Regime(_))));
    }
}
