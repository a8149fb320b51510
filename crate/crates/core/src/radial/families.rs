//! Explicit function families: Aubin–Talenti bubbles and their truncations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{RadialField, RadialGrid};
use crate::error::{Error, Result};
use crate::params::sphere_area;
use crate::quad;

/// `U_{ε,0}(r) = (√(N(N−2)ε)/(ε+r²))^{(N−2)/2}`.
pub fn bubble(n: u32, eps: f64, r: f64) -> f64 {
    let nf = n as f64;
    ((nf * (nf - 2.0) * eps).sqrt() / (eps + r * r)).powf((nf - 2.0) / 2.0)
}

pub fn bubble_derivative(n: u32, eps: f64, r: f64) -> f64 {
    -(n as f64 - 2.0) * r * bubble(n, eps, r) / (eps + r * r)
}

pub fn make_bubble(grid: &Arc<RadialGrid>, eps: f64) -> RadialField {
    let n = grid.dim();
    RadialField::from_fn(grid, |r| bubble(n, eps, r))
}

/// `|U_{1,0}|₂²`, finite for `N ≥ 5`. Since `U_ε(x) = ε^{-(N-2)/4}U₁(x/√ε)`,
/// `|U_{ε,0}|₂² = ε·|U_{1,0}|₂²` in every dimension.
pub fn bubble_mass_unit(n: u32) -> Result<f64> {
    if n < 5 {
        return Err(Error::Regime(format!("|U|_2 diverges for N = {n}")));
    }
    let nf = n as f64;
    let amp2 = (nf * (nf - 2.0)).powf((nf - 2.0) / 2.0);
    let r_max = 1e6;
    let body = quad::integrate_radial(|r| bubble(n, 1.0, r).powi(2) * r.powf(nf - 1.0), 1.0, r_max);
    let tail = amp2 * r_max.powf(4.0 - nf) / (nf - 4.0);
    Ok(sphere_area(n) * (body + tail))
}

/// The `ε_c` with `|U_{ε_c,0}|₂² = c`.
pub fn epsilon_for_mass(n: u32, c: f64) -> Result<f64> {
    Ok(c / bubble_mass_unit(n)?)
}

/// Truncated bubble in `ℝ⁴`: `2√2·n/(1+n²r²)` on `[0,1)`, the linear ramp
/// `2√2·n/(1+n²)·(2−r)` on `[1,2)`, zero beyond. The core piece is the bubble
/// `U_{1/n²,0}`, which is what makes `|∇U_n|₂²` and `|U_n|₄⁴` tend to `S²`.
pub fn truncated_bubble(n: u32, r: f64) -> f64 {
    let nf = n as f64;
    let k = 2.0 * std::f64::consts::SQRT_2;
    if r < 1.0 {
        k * nf / (1.0 + nf * nf * r * r)
    } else if r < 2.0 {
        k * nf / (1.0 + nf * nf) * (2.0 - r)
    } else {
        0.0
    }
}

pub fn truncated_bubble_derivative(n: u32, r: f64) -> f64 {
    let nf = n as f64;
    let k = 2.0 * std::f64::consts::SQRT_2;
    if r < 1.0 {
        let d = 1.0 + nf * nf * r * r;
        -k * nf * 2.0 * nf * nf * r / (d * d)
    } else if r < 2.0 {
        -k * nf / (1.0 + nf * nf)
    } else {
        0.0
    }
}

pub fn make_truncated_bubble(grid: &Arc<RadialGrid>, n: u32) -> Result<RadialField> {
    if grid.dim() != 4 {
        return Err(Error::Regime("truncated bubbles are defined in N = 4".into()));
    }
    if grid.r_max() < 2.0 {
        return Err(Error::InvalidParams(format!("R_max = {} < 2 cannot hold the truncated bubble", grid.r_max())));
    }
    Ok(RadialField::from_fn(grid, |r| truncated_bubble(n, r)))
}

/// Norms of the truncated bubble by high-order quadrature of the exact profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedNorms {
    pub mass2: f64,
    pub grad2: f64,
    pub l4: f64,
}

pub fn truncated_bubble_norms(n: u32) -> TruncatedNorms {
    let omega = sphere_area(4);
    let core = 1.0 / n as f64;
    let piece = |f: &dyn Fn(f64) -> f64| {
        quad::integrate_radial(|r| f(r) * r.powi(3), core, 1.0) + quad::integrate_uniform(|r| f(r) * r.powi(3), 1.0, 2.0, 4)
    };
    TruncatedNorms {
        mass2: omega * piece(&|r| truncated_bubble(n, r).powi(2)),
        grad2: omega * piece(&|r| truncated_bubble_derivative(n, r).powi(2)),
        l4: omega * piece(&|r| truncated_bubble(n, r).powi(4)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::GridSpec;
    use crate::scalar::sobolev_constant;

    #[test]
    fn bubble_center_value() {
        assert!((bubble(5, 1.0, 0.0) - 15f64.powf(0.75)).abs() < 1e-13);
    }

    #[test]
    fn bubble_mass_scaling_is_linear_in_eps() {
        let m1 = bubble_mass_unit(5).unwrap();
        for eps in [0.3, 2.0] {
            let g = RadialGrid::new(GridSpec::for_bubble(5, eps, 4096)).unwrap();
            let direct = g.integrate(|r| bubble(5, eps, r).powi(2));
            assert!((direct - eps * m1).abs() < 2e-8 * eps * m1, "eps={eps}: {direct} vs {}", eps * m1);
        }
    }

    #[test]
    fn n5_mass_stable_and_n4_mass_divergent() {
        let a = bubble_mass_unit(5).unwrap();
        let g = RadialGrid::new(GridSpec::for_bubble(5, 1.0, 16384)).unwrap();
        let b = make_bubble(&g, 1.0).mass();
        assert!((a - b).abs() < 1e-5 * a);
        let masses: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&r| make_bubble(&RadialGrid::new(GridSpec::new(4, 4096, r, 1.0)).unwrap(), 1.0).mass())
            .collect();
        // logarithmic growth: equal increments per decade
        let (d1, d2) = (masses[1] - masses[0], masses[2] - masses[1]);
        assert!(d1 > 0.0 && (d2 / d1 - 1.0).abs() < 0.02);
        assert!(bubble_mass_unit(4).is_err());
    }

    #[test]
    fn truncated_profile_shape() {
        for n in [1, 10, 100] {
            let k = 2.0 * std::f64::consts::SQRT_2;
            assert!((truncated_bubble(n, 0.0) - k * n as f64).abs() < 1e-12 * n as f64);
            assert_eq!(truncated_bubble(n, 2.0), 0.0);
            let below = truncated_bubble(n, 1.0 - 1e-12);
            assert!((below - truncated_bubble(n, 1.0)).abs() < 1e-9);
            assert!(truncated_bubble(n, 2.0 - 1e-12) < 1e-10);
        }
    }

    #[test]
    fn truncated_asymptotic_ratios() {
        let s2 = sobolev_constant(4).powi(2);
        let ns = [10u32, 20, 40, 80, 160, 320];
        let mut seqs = [Vec::new(), Vec::new(), Vec::new()];
        for &n in &ns {
            let t = truncated_bubble_norms(n);
            let nf = n as f64;
            seqs[0].push(t.mass2 * nf * nf / (1.0 + nf * nf).ln());
            seqs[1].push((t.grad2 - s2) * nf * nf);
            seqs[2].push((t.l4 - s2) * nf.powi(4));
        }
        for s in &seqs {
            let (mx, mn) = s.iter().fold((f64::MIN, f64::MAX), |(a, b), v| (a.max(v.abs()), b.min(v.abs())));
            assert!(s.iter().all(|v| v.signum() == s[0].signum()));
            assert!(mx / mn < 10.0, "{s:?}");
        }
    }
}
