//! Monotone piecewise-cubic Hermite interpolation on nonuniform nodes.

/// Shape-preserving cubic through `(x, y)` with zero slope imposed at `x[0]`
/// (radial symmetry at the origin).
#[derive(Clone, Debug)]
pub struct Pchip<'a> {
    x: &'a [f64],
    y: &'a [f64],
    m: Vec<f64>,
}

impl<'a> Pchip<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut m = vec![0.0; n];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        if n > 2 {
            let (h0, h1) = (h[n - 2], h[n - 3]);
            let (d0, d1) = (d[n - 2], d[n - 3]);
            let mut e = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if e * d0 <= 0.0 {
                e = 0.0;
            } else if d0 * d1 <= 0.0 && e.abs() > 3.0 * d0.abs() {
                e = 3.0 * d0;
            }
            m[n - 1] = e;
        } else {
            m[1] = d[0];
        }
        Self { x, y, m }
    }

    /// Value at `t`; zero outside `[x₀, x_last]` on the right, `y₀` on the left.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t > self.x[n - 1] {
            return 0.0;
        }
        let k = match self.x.binary_search_by(|v| v.partial_cmp(&t).expect("finite")) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes_and_cubic_accuracy() {
        let x: Vec<f64> = (0..=200).map(|i| (i as f64 / 200.0).powi(2) * 5.0).collect();
        let y: Vec<f64> = x.iter().map(|r| (-r * r).exp()).collect();
        let p = Pchip::new(&x, &y);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(p.eval(*xi), *yi);
        }
        for k in 0..1000 {
            let t = 4.9 * k as f64 / 1000.0;
            assert!((p.eval(t) - (-t * t).exp()).abs() < 2e-4);
        }
    }

    proptest! {
        #[test]
        fn monotone_data_stays_monotone_and_positive(steps in prop::collection::vec(0.01f64..1.0, 5..40)) {
            let x: Vec<f64> = (0..steps.len()).map(|i| i as f64 * (1.0 + 0.1 * i as f64)).collect();
            let mut y = Vec::new();
            let mut v = 1.0 + steps.iter().sum::<f64>();
            for s in &steps { v -= s; y.push(v); }
            let p = Pchip::new(&x, &y);
            let last = *x.last().unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..=500 {
                let t = last * k as f64 / 500.0;
                let val = p.eval(t);
                prop_assert!(val <= prev + 1e-12);
                prop_assert!(val > 0.0);
                prev = val;
            }
        }
    }
}
