//! Positive roots of generalized polynomials `Σ cₖ tᵉᵏ` on `(0, ∞)`.
//!
//! Every landscape function of the problem (and the fiber derivative) has this form,
//! so brackets, root counts and derivative signs can be handled uniformly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite sum of real powers with distinct exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct GenPoly {
    terms: Vec<(f64, f64)>,
}

impl GenPoly {
    /// Builds from `(coefficient, exponent)` pairs; equal exponents are merged and
    /// zero coefficients dropped.
    pub fn new(terms: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = terms.into_iter().collect();
        v.sort_by(|x, y| x.1.partial_cmp(&y.1).expect("finite exponents"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (c, e) in v {
            match merged.last_mut() {
                Some(last) if (last.1 - e).abs() <= 1e-13 * e.abs().max(1.0) => last.0 += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|t| t.0 != 0.0);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(c, e)| if e == 0.0 { c } else { c * t.powf(e) }).sum()
    }

    /// `p(t)/t^e` with `e` the top exponent for `t ≥ 1` and the bottom one below:
    /// same sign and roots as `p`, but finite wherever `t` is.
    pub fn scaled_eval(&self, t: f64) -> f64 {
        let e_ref = if t >= 1.0 { self.terms.last() } else { self.terms.first() }.map_or(0.0, |x| x.1);
        self.terms.iter().map(|&(c, e)| if e == e_ref { c } else { c * t.powf(e - e_ref) }).sum()
    }

    /// `d/dt`.
    pub fn derivative(&self) -> GenPoly {
        GenPoly::new(self.terms.iter().filter(|t| t.1 != 0.0).map(|&(c, e)| (c * e, e - 1.0)))
    }

    /// `t·d/dt`, the derivative in `s = ln t`.
    pub fn log_derivative(&self) -> GenPoly {
        GenPoly::new(self.terms.iter().map(|&(c, e)| (c * e, e)))
    }

    /// Sign changes of the exponent-ordered coefficients: an upper bound on the
    /// number of positive roots counted with multiplicity.
    pub fn descartes_bound(&self) -> usize {
        self.terms.windows(2).filter(|w| (w[0].0 > 0.0) != (w[1].0 > 0.0)).count()
    }

    /// Points where two monomials have equal magnitude.
    pub fn balance_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                let (ci, ei) = self.terms[i];
                let (cj, ej) = self.terms[j];
                out.push((ci.abs() / cj.abs()).powf(1.0 / (ej - ei)));
            }
        }
        out
    }

    /// True when the top monomial dominates the sum of all others at `t`.
    fn top_dominates(&self, t: f64) -> bool {
        let (cl, el) = *self.terms.last().expect("nonempty");
        let rest: f64 =
            self.terms[..self.terms.len() - 1].iter().map(|&(c, e)| (c / cl).abs() * t.powf(e - el)).sum();
        rest < 1.0
    }

    fn bottom_dominates(&self, t: f64) -> bool {
        let (c0, e0) = self.terms[0];
        let rest: f64 = self.terms[1..].iter().map(|&(c, e)| (c / c0).abs() * t.powf(e - e0)).sum();
        rest < 1.0
    }

    /// Interval outside of which no positive root can lie.
    pub fn root_bracket(&self) -> (f64, f64) {
        let bp = self.balance_points();
        let env_hi = bp.iter().cloned().fold(1.0f64, f64::max).min(1e299);
        let env_lo = bp.iter().cloned().fold(1.0f64, f64::min).max(1e-299);
        let mut hi = 10.0 * env_hi;
        while !self.top_dominates(hi) && hi < 1e300 {
            hi *= 2.0;
        }
        let mut lo = 0.1 * env_lo;
        while !self.bottom_dominates(lo) && lo > 1e-300 {
            lo *= 0.5;
        }
        (lo, hi)
    }
}

/// Root with the sign of the derivative at it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: f64,
    pub value: f64,
    pub slope: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub bracket: (f64, f64),
    pub warnings: Vec<String>,
    /// Extreme values of the function over the scanned bracket.
    pub min_value: f64,
    pub max_value: f64,
}

const SCAN: usize = 2400;
const BISECT_REL: f64 = 1e-6;
const SECANT_REL: f64 = 1e-12;

/// Refines a sign-changing bracket: bisection to `1e-6` relative, then a
/// safeguarded secant to `1e-12` relative.
pub fn refine<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECT_REL * mid.abs() {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let fhi = f(hi);
    let (mut x0, mut f0, mut x1, mut f1) = (lo, flo, hi, fhi);
    for _ in 0..100 {
        let mut x2 = if f1 != f0 { x1 - f1 * (x1 - x0) / (f1 - f0) } else { 0.5 * (lo + hi) };
        if !(x2 > lo && x2 < hi) {
            x2 = 0.5 * (lo + hi);
        }
        let f2 = f(x2);
        if f2 == 0.0 {
            return x2;
        }
        if (f2 > 0.0) == (flo > 0.0) {
            lo = x2;
            flo = f2;
        } else {
            hi = x2;
        }
        let step = (x2 - x1).abs();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if step <= SECANT_REL * x2.abs() || hi - lo <= SECANT_REL * x2.abs() {
            return x2;
        }
    }
    x1
}

/// Locates a sign change of `df` inside `[lo, hi]`.
fn critical_point(df: &GenPoly, lo: f64, hi: f64) -> f64 {
    refine(&|t| df.scaled_eval(t), lo, hi)
}

/// All positive roots of `p`, in increasing order.
///
/// The bracket comes from monomial dominance; a log-spaced scan finds sign changes
/// of `p` and of `p'`, so pairs of roots closer than the scan spacing are still
/// split at the intervening extremum.
pub fn find_roots(p: &GenPoly) -> Result<RootSet> {
    if p.terms().len() < 2 {
        return Err(Error::NoRootFound("a single monomial has no positive root".into()));
    }
    let (lo, hi) = p.root_bracket();
    let dp = p.derivative();
    let f = |t: f64| p.scaled_eval(t);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let step = (ln_hi - ln_lo) / SCAN as f64;
    let grid: Vec<f64> = (0..=SCAN).map(|i| if i == SCAN { hi } else { (ln_lo + step * i as f64).exp() }).collect();

    // Split the scan at interior extrema so each piece is monotone.
    let mut pts = vec![grid[0]];
    for w in grid.windows(2) {
        let (da, db) = (dp.scaled_eval(w[0]), dp.scaled_eval(w[1]));
        if da != 0.0 && db != 0.0 && (da > 0.0) != (db > 0.0) {
            pts.push(critical_point(&dp, w[0], w[1]));
        }
        pts.push(w[1]);
    }

    let mut set = RootSet { bracket: (lo, hi), min_value: f64::INFINITY, max_value: f64::NEG_INFINITY, ..Default::default() };
    if !p.top_dominates(hi) || !p.bottom_dominates(lo) {
        set.warnings.push(format!("bracket [{lo:.3e}, {hi:.3e}] clipped to the floating-point range; roots beyond it are not searched"));
    }
    let vals: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
    for v in pts.iter().map(|&t| p.eval(t)) {
        set.min_value = set.min_value.min(v);
        set.max_value = set.max_value.max(v);
    }
    for i in 0..pts.len() - 1 {
        let (a, b) = (pts[i], pts[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        let x = if fa == 0.0 {
            if i > 0 && set.roots.last().map(|r: &Root| r.x == a).unwrap_or(false) {
                continue;
            }
            a
        } else if fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            refine(&f, a, b)
        } else {
            continue;
        };
        let value = p.eval(x);
        if !value.is_finite() {
            set.warnings.push(format!("root at {x:.6e} lies where p overflows; located on the rescaled function"));
        }
        set.roots.push(Root { x, value, slope: dp.eval(x) });
    }
    if set.roots.is_empty() {
        return Err(Error::NoRootFound(format!(
            "no sign change on [{lo:.6e}, {hi:.6e}]; min value {:.6e}, max value {:.6e}",
            set.min_value, set.max_value
        )));
    }
    let bound = p.descartes_bound();
    if set.roots.len() > bound {
        return Err(Error::TooManyRoots { found: set.roots.len(), max: bound });
    }
    for w in set.roots.windows(2) {
        if w[1].x - w[0].x < 1e-6 * w[1].x {
            set.warnings.push(format!(
                "ill-conditioned root pair at {:.12e} and {:.12e}: separation below 1e-6 relative",
                w[0].x, w[1].x
            ));
        }
    }
    Ok(set)
}

/// Minimum of `p` over its root bracket (useful when no root exists).
pub fn min_over_bracket(p: &GenPoly) -> (f64, f64) {
    let (lo, hi) = p.root_bracket();
    let ratio = (hi.ln() - lo.ln()) / SCAN as f64;
    let mut best = (lo, p.eval(lo));
    for i in 0..=SCAN {
        let t = (lo.ln() + ratio * i as f64).exp();
        let v = p.eval(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let dp = p.derivative();
    let (a, b) = (best.0 * (-ratio).exp(), best.0 * ratio.exp());
    if (dp.eval(a) < 0.0) && (dp.eval(b) > 0.0) {
        let t = critical_point(&dp, a, b);
        let v = p.eval(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}
