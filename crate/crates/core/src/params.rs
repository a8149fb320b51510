//! Problem parameters `(N, a, b, mu, q, c)` and the derived exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of the mass-constrained Kirchhoff problem
/// `-(a + b|∇u|²)Δu + λu = μ|u|^{q-2}u + |u|^{2*-2}u`, `|u|₂² = c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    #[serde(rename = "N")]
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub q: f64,
    pub c: f64,
}

/// Sobolev critical exponent `2N/(N-2)`.
pub fn critical_exponent(n: u32) -> f64 {
    2.0 * n as f64 / (n as f64 - 2.0)
}

/// `δ_q = N(q-2)/(2q)`.
pub fn delta(n: u32, q: f64) -> f64 {
    n as f64 * (q - 2.0) / (2.0 * q)
}

/// Gamma function at `k/2` for positive integers `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0);
    if k % 2 == 0 {
        (1..k / 2).map(|j| j as f64).product()
    } else {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!)
        let m = (k - 1) / 2;
        let mut g = std::f64::consts::PI.sqrt();
        for j in 0..m {
            g *= j as f64 + 0.5;
        }
        g
    }
}

/// Surface area of the unit sphere in ℝᴺ.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n)
}

impl ProblemParams {
    pub fn new(n: u32, a: f64, b: f64, mu: f64, q: f64, c: f64) -> Result<Self> {
        let p = Self { n, a, b, mu, q, c };
        p.validate()?;
        Ok(p)
    }

    /// Checks `N ≥ 4`, `a > 0`, `c > 0`, `2 < q < 2*` and finiteness.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n < 4 {
            return bad(format!("N = {} violates N >= 4", self.n));
        }
        if self.n > 12 {
            return bad(format!("N = {} exceeds the supported range N <= 12", self.n));
        }
        for (name, v) in [("a", self.a), ("b", self.b), ("mu", self.mu), ("q", self.q), ("c", self.c)] {
            if !v.is_finite() {
                return bad(format!("{name} = {v} is not finite"));
            }
        }
        if self.a <= 0.0 {
            return bad(format!("a = {} violates a > 0", self.a));
        }
        if self.c <= 0.0 {
            return bad(format!("c = {} violates c > 0", self.c));
        }
        let ts = self.two_star();
        if !(self.q > 2.0) {
            return bad(format!("q = {} violates q > 2", self.q));
        }
        if !(self.q < ts) {
            return bad(format!("q = {} violates q < 2* = {}", self.q, ts));
        }
        Ok(())
    }

    pub fn two_star(&self) -> f64 {
        critical_exponent(self.n)
    }

    pub fn delta_q(&self) -> f64 {
        delta(self.n, self.q)
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Exponent `q(1-δ_q)/2` carried by the mass in the Gagliardo–Nirenberg bound.
    pub fn mass_exponent(&self) -> f64 {
        self.q * (1.0 - self.delta_q()) / 2.0
    }

    /// Mass-subcritical exponent bound `2 + 4/N`.
    pub fn mass_critical_q(&self) -> f64 {
        2.0 + 4.0 / self.nf()
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_values() {
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(8), 6.0);
        assert!((gamma_half(1) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(5) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert!((sphere_area(2) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * pi).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * pi * pi).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * pi * pi / 3.0).abs() < 1e-12);
    }

    #[test]
    fn validation_names_bound() {
        let e = ProblemParams::new(5, 1.0, 0.0, 0.0, 3.5, 1.0).unwrap_err();
        assert!(e.to_string().contains("q < 2*"));
        let e = ProblemParams::new(4, 0.0, 0.0, 0.0, 2.5, 1.0).unwrap_err();
        assert!(e.to_string().contains("a > 0"));
        assert!(ProblemParams::new(3, 1.0, 0.0, 0.0, 2.5, 1.0).is_err());
        assert!(ProblemParams::new(5, 1.0, -1.0, -2.0, 3.0, 1.0).is_ok());
    }

    #[test]
    fn delta_in_unit_interval() {
        for n in 4..10 {
            let ts = critical_exponent(n);
            for k in 1..20 {
                let q = 2.0 + (ts - 2.0) * k as f64 / 20.0;
                let d = delta(n, q);
                assert!(d > 0.0 && d < 1.0);
            }
        }
    }
}
