//! The fiber map `Ψ_u(s) = I(s∗u)` evaluated by exact rescaling of the norm tuple.

use serde::{Deserialize, Serialize};

use super::{energy_i, pohozaev_p, NormTuple};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::scalar::{find_roots, GenPoly};

/// Largest `|s|·2*` allowed before `e^{2*s}` is considered saturated.
pub const SATURATION_GUARD: f64 = 700.0;

/// Relative band around `Ψ'' = 0` classified as degenerate.
const ZERO_BAND: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootClass {
    Plus,
    Minus,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberRoot {
    pub s: f64,
    pub psi: f64,
    pub psi2: f64,
    pub class: RootClass,
    /// `|∇(s∗u)|₂²`.
    pub grad2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberReport {
    pub roots: Vec<FiberRoot>,
    /// `(s, Ψ(s))` samples across the bracket.
    pub landscape: Vec<(f64, f64)>,
    pub bracket: (f64, f64),
    pub warnings: Vec<String>,
}

fn guard(s: f64, p: &ProblemParams) -> Result<()> {
    if s.abs() > SATURATION_GUARD / p.two_star() {
        return Err(Error::Saturation(s));
    }
    Ok(())
}

/// `(Ψ(s), Ψ'(s), Ψ''(s))`.
pub fn fiber_eval(t: &NormTuple, s: f64, p: &ProblemParams) -> Result<(f64, f64, f64)> {
    guard(s, p)?;
    let d = t.dilated(s, p);
    let qd = p.q * p.delta_q();
    let psi2 = 2.0 * p.a * d.grad2 + 4.0 * p.b * d.grad2 * d.grad2 - p.mu * qd * p.delta_q() * d.lq
        - p.two_star() * d.l2star;
    Ok((energy_i(&d, p), pohozaev_p(&d, p), psi2))
}

/// `Ψ'` as a generalized polynomial in `t = e^s`.
pub fn fiber_poly(t: &NormTuple, p: &ProblemParams) -> GenPoly {
    GenPoly::new([
        (p.a * t.grad2, 2.0),
        (p.b * t.grad2 * t.grad2, 4.0),
        (-p.mu * p.delta_q() * t.lq, p.q * p.delta_q()),
        (-t.l2star, p.two_star()),
    ])
}

fn classify(psi2: f64, a: f64, grad2: f64) -> RootClass {
    if psi2.abs() <= ZERO_BAND * a * grad2 {
        RootClass::Zero
    } else if psi2 > 0.0 {
        RootClass::Plus
    } else {
        RootClass::Minus
    }
}

/// All `s` with `s∗u` on the Pohozaev manifold, classified by the sign of `Ψ''`.
pub fn fiber_project(t: &NormTuple, p: &ProblemParams) -> Result<FiberReport> {
    if t.is_zero() {
        return Err(Error::ZeroField);
    }
    let poly = fiber_poly(t, p);
    let limit = SATURATION_GUARD / p.two_star();
    let (lo, hi) = if poly.terms().len() >= 2 { poly.root_bracket() } else { (1e-3, 1e3) };
    let (s_lo, s_hi) = (lo.ln().max(-limit), hi.ln().min(limit));
    let landscape = (0..=200)
        .map(|i| {
            let s = s_lo + (s_hi - s_lo) * i as f64 / 200.0;
            (s, energy_i(&t.dilated(s, p), p))
        })
        .collect();
    let set = find_roots(&poly)?;
    let mut roots = Vec::with_capacity(set.roots.len());
    for r in &set.roots {
        let s = r.x.ln();
        let (psi, _, psi2) = fiber_eval(t, s, p)?;
        let grad2 = t.dilated(s, p).grad2;
        roots.push(FiberRoot { s, psi, psi2, class: classify(psi2, p.a, grad2), grad2 });
    }
    Ok(FiberReport { roots, landscape, bracket: (s_lo, s_hi), warnings: set.warnings })
}
