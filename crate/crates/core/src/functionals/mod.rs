//! Energies, the Pohozaev functional and fiber maps, all evaluated on [`NormTuple`]s.

mod fiber;
mod gn;
mod tuple;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::scalar::sobolev_constant;
pub use fiber::{fiber_eval, fiber_poly, fiber_project, FiberReport, FiberRoot, RootClass, SATURATION_GUARD};
pub use gn::{gn_constant, gn_constant_on, gn_grid, gn_quotient, GnResult};
pub use tuple::NormTuple;

/// Which functional a flow minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// The energy `I`.
    I,
    /// The auxiliary functional `J` (N = 4, `bS² < 1`).
    J,
}

/// Coefficients of an energy of the form
/// `(a/2)G + (b/4)G² − (μ/q)L_q − (1/p)L_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub q: f64,
    pub p: f64,
}

impl Coefficients {
    pub fn of(obj: Objective, params: &ProblemParams) -> Result<Self> {
        let base = Self { a: params.a, b: params.b, mu: params.mu, q: params.q, p: params.two_star() };
        match obj {
            Objective::I => Ok(base),
            Objective::J => {
                let s = sobolev_constant(params.n);
                let one = 1.0 - params.b * s * s;
                if params.n != 4 || one <= 0.0 {
                    return Err(Error::Regime("J is defined only for N = 4 and b < S^-2".into()));
                }
                Ok(Self { a: params.a / one, b: params.b / one, ..base })
            }
        }
    }

    pub fn energy(&self, t: &NormTuple) -> f64 {
        self.a / 2.0 * t.grad2 + self.b / 4.0 * t.grad2 * t.grad2 - self.mu / self.q * t.lq - t.l2star / self.p
    }

    /// `aG + bG² − μδ_q L_q − L_p`.
    pub fn pohozaev(&self, t: &NormTuple, delta: f64) -> f64 {
        self.a * t.grad2 + self.b * t.grad2 * t.grad2 - self.mu * delta * t.lq - t.l2star
    }
}

/// `I = (a/2)G + (b/4)G² − (μ/q)L_q − (1/2*)L_{2*}`.
pub fn energy_i(t: &NormTuple, p: &ProblemParams) -> f64 {
    Coefficients::of(Objective::I, p).expect("I always defined").energy(t)
}

/// `J = aG/(2(1−bS²)) + bG²/(4(1−bS²)) − (μ/q)L_q − L₄/4`.
pub fn energy_j(t: &NormTuple, p: &ProblemParams) -> Result<f64> {
    Ok(Coefficients::of(Objective::J, p)?.energy(t))
}

pub fn energy(t: &NormTuple, p: &ProblemParams, obj: Objective) -> Result<f64> {
    Ok(Coefficients::of(obj, p)?.energy(t))
}

/// `P = aG + bG² − μδ_q L_q − L_{2*}`.
pub fn pohozaev_p(t: &NormTuple, p: &ProblemParams) -> f64 {
    Coefficients::of(Objective::I, p).expect("I always defined").pohozaev(t, p.delta_q())
}

/// Lagrange multiplier of a critical point on `S_c`: `λ = μ(1−δ_q)L_q/c`.
pub fn multiplier(t: &NormTuple, p: &ProblemParams) -> f64 {
    p.mu * (1.0 - p.delta_q()) * t.lq / p.c
}

/// `K(u) = (a/2 + bA²/4)G − L_{2*}/2* − (μ/q)L_q` and
/// `Q_A(u) = (a + bA²)G − μδ_q L_q − L_{2*}` for a limit profile with
/// gradient-norm limit `A`.
pub fn diagnostics_k_q(t: &NormTuple, big_a: f64, p: &ProblemParams) -> (f64, f64) {
    let a2 = big_a * big_a;
    let k = (p.a / 2.0 + p.b * a2 / 4.0) * t.grad2 - t.l2star / p.two_star() - p.mu / p.q * t.lq;
    let q = (p.a + p.b * a2) * t.grad2 - p.mu * p.delta_q() * t.lq - t.l2star;
    (k, q)
}
