//! Closed-form thresholds, one-dimensional landscape functions and their roots.
//!
//! Everything here is a scalar function of `(N, a, b, μ, q, c)`, the Sobolev
//! constant `S` and, for the perturbed problem, the Gagliardo–Nirenberg constant `C_q`.

pub mod roots;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{critical_exponent, sphere_area, ProblemParams};
use crate::quad;
pub use roots::{find_roots, min_over_bracket, GenPoly, Root, RootSet};

/// `|∇U_{1,0}|₂²` by high-order quadrature of the analytic profile plus the
/// closed-form power-law tail.
pub fn bubble_gradient_energy(n: u32) -> f64 {
    let nf = n as f64;
    let amp = (nf * (nf - 2.0)).powf((nf - 2.0) / 4.0);
    let du = |r: f64| {
        let u = amp * (1.0 + r * r).powf(-(nf - 2.0) / 2.0);
        -(nf - 2.0) * r * u / (1.0 + r * r)
    };
    let r_max = 1e6;
    let body = quad::integrate_radial(|r| du(r).powi(2) * r.powf(nf - 1.0), 1.0, r_max);
    let tail = (nf - 2.0).powi(2) * amp * amp * r_max.powf(2.0 - nf) / (nf - 2.0);
    sphere_area(n) * (body + tail)
}

/// Best Sobolev constant `S`, defined through `S^{N/2} = |∇U_{1,0}|₂²`; cached per `N`.
pub fn sobolev_constant(n: u32) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&s) = cache.lock().expect("cache poisoned").get(&n) {
        return s;
    }
    let s = bubble_gradient_energy(n).powf(2.0 / n as f64);
    *cache.lock().expect("cache poisoned").entry(n).or_insert(s)
}

/// `b₀ = 2/(N-2) · ((N-4)/(a(N-2)))^{(N-4)/2} · S^{-N/2}`.
pub fn b0(n: u32, a: f64) -> f64 {
    let s = sobolev_constant(n);
    if n == 4 {
        return 1.0 / (s * s);
    }
    let nf = n as f64;
    2.0 / (nf - 2.0) * ((nf - 4.0) / (a * (nf - 2.0))).powf((nf - 4.0) / 2.0) * s.powf(-nf / 2.0)
}

/// `b₁ = 4/N · ((N-4)/(aN))^{(N-4)/2} · S^{-N/2}`.
pub fn b1(n: u32, a: f64) -> f64 {
    let s = sobolev_constant(n);
    if n == 4 {
        return 1.0 / (s * s);
    }
    let nf = n as f64;
    4.0 / nf * ((nf - 4.0) / (a * nf)).powf((nf - 4.0) / 2.0) * s.powf(-nf / 2.0)
}

/// The scalar landscape of one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct Landscape {
    pub params: ProblemParams,
    pub s: f64,
    pub cq: Option<f64>,
}

impl Landscape {
    pub fn new(params: ProblemParams, cq: Option<f64>) -> Self {
        Self { params, s: sobolev_constant(params.n), cq }
    }

    fn nf(&self) -> f64 {
        self.params.n as f64
    }

    /// `S^{-2*/2}`.
    fn s_crit(&self) -> f64 {
        self.s.powf(-critical_exponent(self.params.n) / 2.0)
    }

    fn cq(&self) -> Result<f64> {
        self.cq.ok_or(Error::MissingGnConstant)
    }

    /// `g(t) = bS^{N/2}t² − t^{4/(N−2)} + a`.
    pub fn g_poly(&self) -> GenPoly {
        let p = &self.params;
        GenPoly::new([(p.b * self.s.powf(self.nf() / 2.0), 2.0), (-1.0, 4.0 / (self.nf() - 2.0)), (p.a, 0.0)])
    }

    /// `f(t) = bt² − S^{-N/(N-2)}t^{4/(N−2)} + a`.
    pub fn f_poly(&self) -> GenPoly {
        let p = &self.params;
        GenPoly::new([(p.b, 2.0), (-self.s_crit(), 4.0 / (self.nf() - 2.0)), (p.a, 0.0)])
    }

    /// `h(t) = (a/2)t² + (b/4)t⁴ − S^{-2*/2}t^{2*}/2*`, the fiber lower bound.
    pub fn h_poly(&self) -> GenPoly {
        let p = &self.params;
        let ts = p.two_star();
        GenPoly::new([(p.a / 2.0, 2.0), (p.b / 4.0, 4.0), (-self.s_crit() / ts, ts)])
    }

    /// `k(t) = (a/4)t² − (1/2* − 1/4)S^{-2*/2}t^{2*}`.
    pub fn k_poly(&self) -> GenPoly {
        let p = &self.params;
        let ts = p.two_star();
        GenPoly::new([(p.a / 4.0, 2.0), (-(1.0 / ts - 0.25) * self.s_crit(), ts)])
    }

    /// Reduced energy `𝓘₀(t) = at/N − (N−4)bt²/(4N)` as a function of `t = |∇u|₂²`.
    pub fn i0_reduced_poly(&self) -> GenPoly {
        let p = &self.params;
        let nf = self.nf();
        GenPoly::new([(p.a / nf, 1.0), (-(nf - 4.0) * p.b / (4.0 * nf), 2.0)])
    }

    /// `μ c^{q(1−δ_q)/2} C_q^q`.
    fn perturbation(&self) -> Result<f64> {
        let p = &self.params;
        Ok(p.mu * p.c.powf(p.mass_exponent()) * self.cq()?.powf(p.q))
    }

    /// `f₁(t) = bt⁴ − S^{-2*/2}t^{2*} + at² − μc^{q(1−δ_q)/2}C_q^q δ_q t^{qδ_q}`.
    pub fn f1_poly(&self) -> Result<GenPoly> {
        let p = &self.params;
        let ts = p.two_star();
        let d = p.delta_q();
        let m = self.perturbation()?;
        Ok(GenPoly::new([(p.b, 4.0), (-self.s_crit(), ts), (p.a, 2.0), (-m * d, p.q * d)]))
    }

    /// `h₁(t) = (a/2)t² + (b/4)t⁴ − (μ/q)C_q^q c^{q(1−δ_q)/2} t^{qδ_q} − S^{-2*/2}t^{2*}/2*`.
    pub fn h1_poly(&self) -> Result<GenPoly> {
        let p = &self.params;
        let ts = p.two_star();
        let m = self.perturbation()?;
        Ok(GenPoly::new([
            (p.a / 2.0, 2.0),
            (p.b / 4.0, 4.0),
            (-m / p.q, p.q * p.delta_q()),
            (-self.s_crit() / ts, ts),
        ]))
    }

    /// `f_c(k) = a/2 − (μC_q^q/q)c^{(4−q)/2}k^{q−3} − (1−bS²)k/(4S²)` (N = 4).
    pub fn fc_poly(&self, c: f64) -> Result<GenPoly> {
        let p = &self.params;
        if p.n != 4 {
            return Err(Error::Regime("f_c is defined for N = 4 only".into()));
        }
        let s2 = self.s * self.s;
        let cq = self.cq()?.powf(p.q);
        Ok(GenPoly::new([
            (p.a / 2.0, 0.0),
            (-p.mu * cq / p.q * c.powf((4.0 - p.q) / 2.0), p.q - 3.0),
            (-(1.0 - p.b * s2) / (4.0 * s2), 1.0),
        ]))
    }

    /// Maximizer `k_c = [4μC_q^qS²(3−q)/(q(1−bS²))]^{1/(4−q)} c^{1/2}` of `f_c` (N = 4).
    pub fn k_c(&self, c: f64) -> Result<f64> {
        let p = &self.params;
        let s2 = self.s * self.s;
        let cq = self.cq()?.powf(p.q);
        Ok((4.0 * p.mu * cq * s2 * (3.0 - p.q) / (p.q * (1.0 - p.b * s2))).powf(1.0 / (4.0 - p.q)) * c.sqrt())
    }

    /// `c_{N}(ξ) = aξ²/N − (N−4)bξ⁴/(4N)`.
    pub fn level(&self, xi: f64) -> f64 {
        let nf = self.nf();
        self.params.a * xi * xi / nf - (nf - 4.0) / (4.0 * nf) * self.params.b * xi.powi(4)
    }
}

/// Every threshold of a parameter point; entries that do not apply are `None`
/// and the reason is recorded in `notes`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ThresholdSet {
    #[serde(rename = "S")]
    pub s: f64,
    pub b0: f64,
    pub b1: f64,
    pub eta: Option<f64>,
    pub xi_minus: Option<f64>,
    pub xi_plus: Option<f64>,
    pub c_n_minus: Option<f64>,
    pub c_n_plus: Option<f64>,
    /// Single root of `f` when `b ≤ 0`.
    pub xi_one: Option<f64>,
    pub c_n: Option<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: Option<f64>,
    pub cq: Option<f64>,
    pub k0: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub k_c: Option<f64>,
    pub xi0_mu: Option<f64>,
    pub xi_minus_mu: Option<f64>,
    pub xi_plus_mu: Option<f64>,
    pub xi0_mu1: Option<f64>,
    pub notes: Vec<String>,
}

/// Computes all thresholds; `cq` is required for the perturbed quantities.
pub fn thresholds(params: &ProblemParams, cq: Option<f64>) -> Result<ThresholdSet> {
    params.validate()?;
    let ls = Landscape::new(*params, cq);
    let (n, a, b) = (params.n, params.a, params.b);
    let s = ls.s;
    let mut t = ThresholdSet { s, b0: b0(n, a), b1: b1(n, a), cq, ..Default::default() };
    if n >= 5 {
        if b > 0.0 {
            t.eta = Some((2.0 * a / ((n as f64 - 4.0) * b)).sqrt());
        }
        if b > 0.0 && b < t.b0 {
            match find_roots(&ls.f_poly()) {
                Ok(set) if set.roots.len() == 2 => {
                    let (xm, xp) = (set.roots[0].x, set.roots[1].x);
                    t.xi_minus = Some(xm);
                    t.xi_plus = Some(xp);
                    t.c_n_minus = Some(ls.level(xm));
                    t.c_n_plus = Some(ls.level(xp));
                    t.notes.extend(set.warnings);
                }
                Ok(set) => t.notes.push(format!("f has {} roots, expected 2", set.roots.len())),
                Err(e) => t.notes.push(format!("f roots: {e}")),
            }
        } else if b <= 0.0 {
            match find_roots(&ls.f_poly()) {
                Ok(set) => {
                    let x = set.roots[0].x;
                    t.xi_one = Some(x);
                    t.c_n = Some(ls.level(x));
                }
                Err(e) => t.notes.push(format!("f roots: {e}")),
            }
        } else {
            t.notes.push("b >= b0: f has no positive root".into());
        }
        if params.mu > 0.0 && b > 0.0 && b < t.b0 {
            match perturbed_roots(&ls) {
                Ok((r, z)) => {
                    t.xi0_mu = Some(r[0]);
                    t.xi_minus_mu = Some(r[1]);
                    t.xi_plus_mu = Some(r[2]);
                    t.xi0_mu1 = z;
                    if z.is_none() {
                        t.notes.push("h1(xi_plus_mu) <= 0: unique zero of h1 not established".into());
                    }
                }
                Err(e) => t.notes.push(format!("f1 roots: {e}")),
            }
        }
    } else {
        let s2 = s * s;
        if b < 1.0 / s2 {
            t.lambda = Some(a * a * s2 / (4.0 * (1.0 - b * s2)));
        } else {
            t.notes.push("b >= S^-2: Lambda undefined".into());
        }
        let q = params.q;
        if params.mu > 0.0 && b > 0.0 && b < 1.0 / s2 && q < 3.0 {
            match cq {
                Some(cq) => {
                    let one = 1.0 - b * s2;
                    let k0 = 2.0 * a * s2 * (3.0 - q) / (one * (4.0 - q));
                    let cqq = cq.powf(q);
                    let c0 = k0 * k0 * (q * one / (4.0 * params.mu * cqq * s2 * (3.0 - q))).powf(2.0 / (4.0 - q));
                    let c1 = (a * q * k0.powf(3.0 - q) / (2.0 * params.mu * cqq * (4.0 - q) * one))
                        .powf(2.0 / (4.0 - q));
                    t.k0 = Some(k0);
                    t.c0 = Some(c0);
                    t.c1 = Some(c1);
                    t.k_c = ls.k_c(params.c).ok();
                }
                None => t.notes.push("C_q not supplied: k0, c0, c1, k_c omitted".into()),
            }
        }
    }
    if params.mu > 0.0 && cq.is_none() && n >= 5 && b > 0.0 && b < t.b0 {
        t.notes.push("C_q not supplied: roots of f1 and h1 omitted".into());
    }
    Ok(t)
}

/// Roots `ξ₀^μ < ξ₋^μ < ξ₊^μ` of `f₁`, and the zero `ξ₀^{μ,1}` of `h₁` when
/// the sufficient condition `h₁(ξ₊^μ) > 0` holds.
pub fn perturbed_roots(ls: &Landscape) -> Result<([f64; 3], Option<f64>)> {
    let f1 = ls.f1_poly()?;
    let set = find_roots(&f1)?;
    if set.roots.len() != 3 {
        return Err(Error::NoRootFound(format!("f1 has {} positive roots, expected 3", set.roots.len())));
    }
    let r = [set.roots[0].x, set.roots[1].x, set.roots[2].x];
    let h1 = ls.h1_poly()?;
    if h1.eval(r[2]) <= 0.0 {
        return Ok((r, None));
    }
    let z = refine_in(&h1, r[0], r[1]);
    Ok((r, z))
}

fn refine_in(p: &GenPoly, lo: f64, hi: f64) -> Option<f64> {
    let (a, b) = (p.eval(lo), p.eval(hi));
    if (a > 0.0) == (b > 0.0) {
        return None;
    }
    Some(roots::refine(&|t| p.eval(t), lo, hi))
}
