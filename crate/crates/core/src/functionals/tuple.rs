use serde::{Deserialize, Serialize};

use crate::params::ProblemParams;

/// The four integrals every functional depends on:
/// `|∇u|₂²`, `|u|₂²`, `|u|_q^q`, `|u|_{2*}^{2*}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormTuple {
    pub grad2: f64,
    pub mass2: f64,
    pub lq: f64,
    pub l2star: f64,
}

impl NormTuple {
    pub fn new(grad2: f64, mass2: f64, lq: f64, l2star: f64) -> Self {
        Self { grad2, mass2, lq, l2star }
    }

    pub fn is_zero(&self) -> bool {
        self.grad2 == 0.0 && self.mass2 == 0.0 && self.lq == 0.0 && self.l2star == 0.0
    }

    /// Tuple of the dilation `s∗u = e^{Ns/2}u(e^s·)`: exact exponential rescaling.
    pub fn dilated(&self, s: f64, p: &ProblemParams) -> Self {
        Self {
            grad2: self.grad2 * (2.0 * s).exp(),
            mass2: self.mass2,
            lq: self.lq * (p.q * p.delta_q() * s).exp(),
            l2star: self.l2star * (p.two_star() * s).exp(),
        }
    }

    /// Tuple of `τ·u` for a constant amplitude factor.
    pub fn amplified(&self, tau: f64, p: &ProblemParams) -> Self {
        Self {
            grad2: self.grad2 * tau * tau,
            mass2: self.mass2 * tau * tau,
            lq: self.lq * tau.abs().powf(p.q),
            l2star: self.l2star * tau.abs().powf(p.two_star()),
        }
    }
}
