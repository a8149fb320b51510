//! Gauss–Legendre rules and composite integration on geometric panels.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached 8-point rule, exact for polynomials of degree 15.
pub fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

/// Integrates `f` over `[lo, hi]` with the 8-point rule.
pub fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let (x, w) = gl8();
    let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    x.iter().zip(w).map(|(xi, wi)| wi * f(m + h * xi)).sum::<f64>() * h
}

/// Composite rule on `[0, r_max]` with panels refined geometrically away from `core`.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: F, core: f64, r_max: f64) -> f64 {
    let mut total = 0.0;
    let inner = core.min(r_max);
    total += integrate_uniform(&f, 0.0, inner, 50);
    let mut lo = inner;
    while lo < r_max {
        let hi = (lo * 1.08).min(r_max);
        total += panel(&f, lo, hi);
        lo = hi;
    }
    total
}

/// Composite rule on `[lo, hi]` with `n` equal panels.
pub fn integrate_uniform<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| panel(&f, lo + i as f64 * h, lo + (i + 1) as f64 * h)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n={n}");
            for pair in x.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
    }

    #[test]
    fn exact_up_to_degree_fifteen() {
        for d in 0..=15 {
            let got = panel(&|x: f64| x.powi(d), 0.0, 2.0);
            let exact = 2f64.powi(d + 1) / (d + 1) as f64;
            assert!((got - exact).abs() < 1e-12 * exact, "degree {d}");
        }
    }

    #[test]
    fn radial_composite_handles_long_tails() {
        // ∫₀^∞ r/(1+r²)^3 dr = 1/4
        let got = integrate_radial(|r| r / (1.0 + r * r).powi(3), 1.0, 1e4);
        assert!((got - 0.25).abs() < 1e-13);
    }
}
