//! Explicit test fields for the `N = 4`, `μ = 0` probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::params::sphere_area;
use crate::quad;
use crate::radial::{bubble, bubble_derivative, GridSpec, RadialField, RadialGrid};

fn smooth_step(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn smooth_step_derivative(x: f64) -> f64 {
    if x > 0.0 {
        smooth_step(x) / (x * x)
    } else {
        0.0
    }
}

/// Smooth non-increasing cutoff, 1 on `[0,1]`, 0 beyond 2.
pub fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let (a, b) = (smooth_step(2.0 - r), smooth_step(r - 1.0));
    a / (a + b)
}

pub fn cutoff_derivative(r: f64) -> f64 {
    if r <= 1.0 || r >= 2.0 {
        return 0.0;
    }
    let (a, b) = (smooth_step(2.0 - r), smooth_step(r - 1.0));
    let (da, db) = (-smooth_step_derivative(2.0 - r), smooth_step_derivative(r - 1.0));
    (da * b - a * db) / ((a + b) * (a + b))
}

/// `(|∇u_ε|₂², |u_ε|₄⁴)` of `u_ε = ψU_{ε,0}` in `ℝ⁴`.
pub fn cut_bubble_norms(eps: f64) -> (f64, f64) {
    let core = eps.sqrt();
    let omega = sphere_area(4);
    let grad = |r: f64| {
        let d = cutoff_derivative(r) * bubble(4, eps, r) + cutoff(r) * bubble_derivative(4, eps, r);
        d * d * r.powi(3)
    };
    let l4 = |r: f64| (cutoff(r) * bubble(4, eps, r)).powi(4) * r.powi(3);
    let g = quad::integrate_radial(grad, core, 1.0) + quad::integrate_uniform(grad, 1.0, 2.0, 64);
    let p = quad::integrate_radial(l4, core, 1.0) + quad::integrate_uniform(l4, 1.0, 2.0, 64);
    (omega * g, omega * p)
}

/// `a²|∇v|₂⁴ / (4(|v|₄⁴ − b|∇v|₂⁴))` for `v = ψU_{ε,0}`, which is amplitude invariant.
pub fn lambda_quotient(a: f64, b: f64, eps: f64) -> f64 {
    let (g, l4) = cut_bubble_norms(eps);
    a * a * g * g / (4.0 * (l4 - b * g * g))
}

/// `ε` values `{0.2, 0.1, 0.05}·k` with `k = min(1, (1−bS²)/(10bS²))`: the quotient's
/// first-order term in `ε` carries a factor `1/(1−bS²)`, so the window shrinks as
/// `bS² → 1` to stay in the linear regime.
pub fn probe_window(b_s2: f64) -> [f64; 3] {
    let k = if b_s2 > 0.0 { ((1.0 - b_s2) / (10.0 * b_s2)).min(1.0) } else { 1.0 };
    [0.2 * k, 0.1 * k, 0.05 * k]
}

/// Least-squares line `y = slope·x + intercept` and its `R²`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Smooth random radial fields (sums of signed Gaussian bumps) with mass `c`.
pub fn random_fields(n: u32, count: usize, seed: u64, c: f64) -> Result<Vec<RadialField>> {
    let grid = RadialGrid::new(GridSpec::new(n, 2048, 40.0, 1.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..5);
        let bumps: Vec<(f64, f64, f64)> = (0..k)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..5.0), rng.gen_range(0.2..3.0)))
            .collect();
        let u = RadialField::from_fn(&grid, |r| {
            bumps.iter().map(|(a, m, s)| a * (-((r - m) / s).powi(2)).exp()).sum::<f64>()
        });
        let mut u = u;
        let last = u.values.len() - 1;
        u.values[last] = 0.0;
        if u.mass() > 1e-8 {
            out.push(u.project_mass(c)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sobolev_constant;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-12);
        let h = 1e-6;
        for r in [1.1, 1.4, 1.7, 1.95] {
            let fd = (cutoff(r + h) - cutoff(r - h)) / (2.0 * h);
            assert!((fd - cutoff_derivative(r)).abs() < 1e-6);
            assert!(cutoff_derivative(r) <= 0.0);
        }
    }

    #[test]
    fn quotient_tends_to_lambda_linearly() {
        let s2 = sobolev_constant(4).powi(2);
        for bs2 in [0.05, 0.3, 0.5, 0.9] {
            let b = bs2 / s2;
            let lambda = s2 / (4.0 * (1.0 - bs2));
            let eps = probe_window(bs2);
            let q: Vec<f64> = eps.iter().map(|&e| lambda_quotient(1.0, b, e)).collect();
            assert!(q[0] > q[1] && q[1] > q[2] && q[2] > lambda, "bS2={bs2}: {q:?}");
            let (_, intercept, r2) = linear_fit(&eps, &q);
            assert!(r2 > 0.99, "bS2={bs2}: r2={r2}");
            assert!((intercept - lambda).abs() < 0.02 * lambda);
        }
        assert_eq!(probe_window(0.05), [0.2, 0.1, 0.05]);
    }

    #[test]
    fn fit_of_a_line_is_exact() {
        let (s, i, r2) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-14 && (i - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_fields_have_mass_c() {
        let f = random_fields(4, 10, 3, 2.5).unwrap();
        assert_eq!(f.len(), 10);
        assert!(f.iter().all(|u| (u.mass() - 2.5).abs() < 1e-12));
        let g = random_fields(4, 10, 3, 2.5).unwrap();
        assert_eq!(f, g);
    }
}
