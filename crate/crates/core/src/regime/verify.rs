//! Per-regime check lists assembled into a versioned report.

use serde::{Deserialize, Serialize};

use super::checks::{Check, CheckStatus};
use super::probes::{lambda_quotient, linear_fit, probe_window, random_fields};
use super::{classify, RegimeTag};
use crate::error::{Error, Result};
use crate::functionals::{energy_i, fiber_project, gn_constant, multiplier, FiberRoot, NormTuple, Objective, RootClass};
use crate::params::ProblemParams;
use crate::scalar::{find_roots, min_over_bracket, sobolev_constant, thresholds, Landscape, ThresholdSet};
use crate::solver::{
    best_w_path, bubble_tuple, local_minimizer, mp_path_mu0, mu_sweep, region_barrier, FlowResult, PathReport,
    PATH_SAMPLES,
};

pub const REPORT_SCHEMA: u32 = 1;

/// Relative tolerance for levels read off a fiber or a path.
const LEVEL_TOL: f64 = 5e-3;
const PROJECTED_SAMPLES: usize = 50;
const RANDOM_SAMPLES: usize = 100;
const SAMPLE_SEED: u64 = 20240601;
const W_PATH_NS: [u32; 4] = [10, 20, 40, 80];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    /// Closed-form and tuple-level checks only.
    Quick,
    /// Adds flows and explicit paths.
    Full,
}

impl std::str::FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quick" => Ok(Depth::Quick),
            "full" => Ok(Depth::Full),
            other => Err(Error::Format(format!("depth must be quick or full, got {other:?}"))),
        }
    }
}

/// Summary of a flow or path a report relied on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Artifact {
    Flow {
        label: String,
        objective: Objective,
        status: String,
        energy: f64,
        energy_i: f64,
        multiplier: f64,
        grad2: f64,
        el_residual: f64,
        iters: usize,
        grid_signature: String,
    },
    Path {
        label: String,
        path: String,
        sup_level: f64,
        n: Option<u32>,
        margin: Option<f64>,
        quadrature_error: Option<f64>,
        grid_signature: Option<String>,
    },
}

impl Artifact {
    fn flow(label: &str, r: &FlowResult) -> Self {
        Artifact::Flow {
            label: label.into(),
            objective: r.config.objective,
            status: serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            energy: r.energy,
            energy_i: r.energy_i,
            multiplier: r.multiplier,
            grad2: r.tuple.grad2,
            el_residual: r.el_residual,
            iters: r.iters,
            grid_signature: r.grid_signature.clone(),
        }
    }

    fn path(label: &str, r: &PathReport) -> Self {
        Artifact::Path {
            label: label.into(),
            path: serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            sup_level: r.sup_level,
            n: r.n,
            margin: r.comparison.as_ref().map(|c| c.margin),
            quadrature_error: r.quadrature_error,
            grid_signature: r.grid_signature.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub schema: u32,
    pub params: ProblemParams,
    pub depth: Depth,
    pub thresholds: ThresholdSet,
    pub regime_tag: RegimeTag,
    /// Other tags whose hypotheses hold at the same point.
    pub also: Vec<RegimeTag>,
    pub alias: Option<String>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
    /// No check failed or errored; marginal checks do not count as failures.
    pub passed: bool,
}

impl RegimeReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

struct Builder {
    checks: Vec<Check>,
    artifacts: Vec<Artifact>,
}

impl Builder {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn or_error<T>(&mut self, name: &str, claim: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(Check::error(name, claim, e));
                None
            }
        }
    }
}

fn need(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Regime(format!("{what} unavailable")))
}

/// Runs the check list of the regime `params` falls in.
pub fn verify(params: &ProblemParams, depth: Depth) -> Result<RegimeReport> {
    let class = classify(params);
    if class.tag == RegimeTag::Inadmissible {
        return Err(Error::Regime(format!(
            "inadmissible parameters: violates {}",
            class.violated.unwrap_or_else(|| "the hypothesis table".into())
        )));
    }
    let cq = if params.mu > 0.0 { Some(gn_constant(params.n, params.q)?) } else { None };
    let t = thresholds(params, cq)?;
    let mut b = Builder { checks: vec![], artifacts: vec![] };
    match class.tag {
        RegimeTag::PureCriticalTwoLevels => two_levels(params, &t, &mut b),
        RegimeTag::PureCriticalNegativeB => negative_b(params, &t, &mut b),
        RegimeTag::PureCriticalNonexistence => nonexistence(params, &mut b),
        RegimeTag::Defocusing => defocusing(params, &t, &mut b),
        RegimeTag::FourDimPureCritical => four_dim_pure(params, &t, &mut b),
        RegimeTag::PerturbedMinimizer => perturbed(params, &t, depth, &mut b),
        RegimeTag::FourDimLocalMinimizer => four_dim_minimizers(params, &t, depth, false, &mut b),
        RegimeTag::FourDimMountainPass => four_dim_minimizers(params, &t, depth, true, &mut b),
        RegimeTag::Inadmissible => unreachable!(),
    }
    let passed = !b.checks.iter().any(Check::failed);
    Ok(RegimeReport {
        schema: REPORT_SCHEMA,
        params: *params,
        depth,
        thresholds: t,
        regime_tag: class.tag,
        also: class.also,
        alias: (class.tag == RegimeTag::PerturbedMinimizer)
            .then(|| "Th2.6 and Th3.1 are one result under two numberings".into()),
        checks: b.checks,
        artifacts: b.artifacts,
        passed,
    })
}

/// Fiber roots, with a fiber that has no critical point giving an empty list.
fn fiber_roots(t: &NormTuple, p: &ProblemParams) -> Result<Vec<FiberRoot>> {
    match fiber_project(t, p) {
        Ok(f) => Ok(f.roots),
        Err(Error::NoRootFound(_)) => Ok(vec![]),
        Err(e) => Err(e),
    }
}

fn count_class(roots: &[FiberRoot], class: RootClass) -> usize {
    roots.iter().filter(|r| r.class == class).count()
}

fn two_levels(p: &ProblemParams, t: &ThresholdSet, b: &mut Builder) {
    let claim = "the bubble's fiber has one local maximum and one local minimum";
    let Some(fiber) = b.or_error("fiber_two_roots", claim, bubble_tuple(p.n, p.q, p.c).and_then(|u| fiber_project(&u, p)))
    else {
        return;
    };
    b.push(Check::count("fiber_two_roots", claim, fiber.roots.len(), 2));
    b.push(Check::count("fiber_minus_root", "exactly one fiber root is a local maximum", count_class(&fiber.roots, RootClass::Minus), 1));
    b.push(Check::count("fiber_plus_root", "exactly one fiber root is a local minimum", count_class(&fiber.roots, RootClass::Plus), 1));
    let levels = need(t.c_n_minus, "c_{N,-}").and_then(|m| Ok((m, need(t.c_n_plus, "c_{N,+}")?)));
    let Some((cm, cp)) = b.or_error("levels", "closed-form levels exist for 0 < b < b0", levels) else {
        return;
    };
    let level_of = |class| fiber.roots.iter().find(|r| r.class == class).map(|r| r.psi);
    if let Some(psi) = level_of(RootClass::Minus) {
        b.push(Check::close("minus_level", "fiber maximum equals c_{N,-}", psi, cm, LEVEL_TOL));
    }
    if let Some(psi) = level_of(RootClass::Plus) {
        b.push(Check::close_on("plus_level", "fiber minimum equals c_{N,+}", psi, cp, LEVEL_TOL, cp.abs().max(1e-6 * cm)));
    }
    b.push(Check::gt("levels_ordered", "c_{N,-} > c_{N,+}", cm, cp));
    if p.b > t.b1 {
        b.push(Check::gt("plus_level_sign", "c_{N,+} > 0 for b1 < b < b0", cp, 0.0).with("b1", t.b1).tie_within(cp, cm));
    } else {
        b.push(Check::le("plus_level_sign", "c_{N,+} <= 0 for 0 < b <= b1", cp, 0.0).with("b1", t.b1).tie_within(cp, cm));
    }
    let claim = "the dilation path's sup equals c_{N,-}";
    if let Some(path) = b.or_error("path_sup", claim, mp_path_mu0(p, PATH_SAMPLES)) {
        b.push(Check::close("path_sup", claim, path.sup_level, cm, LEVEL_TOL));
        b.artifacts.push(Artifact::path("dilation path", &path));
    }
}

fn negative_b(p: &ProblemParams, t: &ThresholdSet, b: &mut Builder) {
    let claim = "the bubble's fiber has a single local maximum";
    let Some(fiber) = b.or_error("fiber_one_root", claim, bubble_tuple(p.n, p.q, p.c).and_then(|u| fiber_project(&u, p)))
    else {
        return;
    };
    b.push(Check::count("fiber_one_root", claim, fiber.roots.len(), 1));
    b.push(Check::count("fiber_minus_root", "the root is a local maximum", count_class(&fiber.roots, RootClass::Minus), 1));
    let Some(cn) = b.or_error("level", "closed-form level exists for b < 0", need(t.c_n, "c_N")) else {
        return;
    };
    if let Some(r) = fiber.roots.first() {
        b.push(Check::close("minus_level", "fiber maximum equals c_N", r.psi, cn, LEVEL_TOL));
    }
    b.push(Check::gt("level_positive", "c_N > 0", cn, 0.0));
}

fn nonexistence(p: &ProblemParams, b: &mut Builder) {
    let f = Landscape::new(*p, None).f_poly();
    let (arg, min) = min_over_bracket(&f);
    b.push(Check::gt("f_positive", "min_t f(t) > 0 for b > b0", min, 0.0).with("argmin", arg));
    let claim = "f has no positive root";
    match find_roots(&f) {
        Err(Error::NoRootFound(msg)) => b.push(Check::count("f_no_root", claim, 0, 0).detail(msg)),
        Ok(set) => b.push(Check::count("f_no_root", claim, set.roots.len(), 0)),
        Err(e) => b.push(Check::error("f_no_root", claim, e)),
    }
    let claim = "the bubble's fiber has no critical point";
    if let Some(fiber) = b.or_error("fiber_empty", claim, bubble_tuple(p.n, p.q, p.c).and_then(|u| fiber_roots(&u, p))) {
        b.push(Check::count("fiber_empty", claim, fiber.len(), 0));
    }
}

/// Pohozaev points obtained by projecting random fields along their fibers.
fn projected_points(p: &ProblemParams) -> Result<Vec<NormTuple>> {
    let mut out = Vec::new();
    for u in random_fields(p.n, PROJECTED_SAMPLES, SAMPLE_SEED, p.c)? {
        let tuple = u.norm_tuple(p.q);
        for r in fiber_roots(&tuple, p)? {
            out.push(tuple.dilated(r.s, p));
        }
    }
    Ok(out)
}

fn defocusing(p: &ProblemParams, t: &ThresholdSet, b: &mut Builder) {
    let claim = "fiber projections of random fields";
    let Some(points) = b.or_error("projection", claim, projected_points(p)) else {
        return;
    };
    if p.b >= t.b0 {
        b.push(Check::count("no_pohozaev_points", "no projected Pohozaev point for b >= b0", points.len(), 0));
        return;
    }
    if points.is_empty() {
        b.push(Check::error("projection", claim, "no sample reached the Pohozaev manifold"));
        return;
    }
    let lam = points.iter().map(|u| multiplier(u, p)).fold(f64::NEG_INFINITY, f64::max);
    b.push(Check::lt("multiplier_sign", "lambda = mu(1-delta_q)|u|_q^q/c < 0 on every projected point", lam, 0.0)
        .with("samples", points.len() as f64));
    let Some(cp) = b.or_error("energy_floor", "closed-form c_{N,+}", need(t.c_n_plus, "c_{N,+}")) else {
        return;
    };
    let low = points.iter().map(|u| energy_i(u, p)).fold(f64::INFINITY, f64::min);
    b.push(Check::gt("energy_floor", "I(u) > c_{N,+} on every projected point", low, cp).with("samples", points.len() as f64));
}

fn four_dim_pure(p: &ProblemParams, t: &ThresholdSet, b: &mut Builder) {
    let s2 = sobolev_constant(4).powi(2);
    let bs2 = p.b * s2;
    if bs2 < 1.0 {
        let formula = p.a * p.a * s2 / (4.0 * (1.0 - bs2));
        let Some(lambda) = b.or_error("lambda", "Lambda is defined for b < S^-2", need(t.lambda, "Lambda")) else {
            return;
        };
        b.push(Check::close("lambda_formula", "Lambda = a^2 S^2 / (4(1 - bS^2))", lambda, formula, 1e-12));
        let eps = probe_window(bs2);
        let qs: Vec<f64> = eps.iter().map(|&e| lambda_quotient(p.a, p.b, e)).collect();
        let claim = "the cut-off bubble quotient decreases toward Lambda";
        b.push(Check::gt("quotient_decreasing", claim, qs[0], qs[1]).with("eps", eps[0]).with("eps_next", eps[1]));
        b.push(Check::gt("quotient_decreasing", claim, qs[1], qs[2]).with("eps", eps[1]).with("eps_next", eps[2]));
        b.push(Check::gt("quotient_above_lambda", "the quotient stays above Lambda", qs[2], lambda));
        let (slope, intercept, r2) = linear_fit(&eps, &qs);
        b.push(Check::gt("quotient_linear", "the quotient is linear in eps (R^2 > 0.99)", r2, 0.99).with("slope", slope));
        b.push(Check::close("quotient_intercept", "the linear fit extrapolates to Lambda", intercept, lambda, 0.02));
        return;
    }
    let claim = "I > 0 on random fields of mass c for b >= S^-2";
    let Some(fields) = b.or_error("energy_positive", claim, random_fields(4, RANDOM_SAMPLES, SAMPLE_SEED, p.c)) else {
        return;
    };
    let tuples: Vec<_> = fields.iter().map(|u| u.norm_tuple(p.q)).collect();
    let low = tuples.iter().map(|u| energy_i(u, p)).fold(f64::INFINITY, f64::min);
    b.push(Check::gt("energy_positive", claim, low, 0.0).with("samples", tuples.len() as f64));
    let mut critical = 0;
    for u in &tuples {
        match fiber_roots(u, p) {
            Ok(f) => critical += f.len(),
            Err(e) => {
                b.push(Check::error("no_pohozaev_points", "fiber projection", e));
                return;
            }
        }
    }
    b.push(Check::count("no_pohozaev_points", "no fiber of a random field has a critical point", critical, 0));
    let first = tuples[0];
    let levels: Vec<f64> = [0.0, -2.0, -4.0, -8.0].iter().map(|&s| energy_i(&first.dilated(s, p), p)).collect();
    let claim = "energies along spreading dilations decrease to 0";
    let monotone = levels.windows(2).filter(|w| !(w[1] < w[0] && w[1] > 0.0)).count();
    b.push(Check::count("dilation_decrease", claim, monotone, 0));
    b.push(Check::lt("dilation_limit", claim, levels[3], 1e-3 * levels[0]));
}

fn flow_certificates(b: &mut Builder, label: &str, r: &FlowResult) {
    let a = crate::functionals::Coefficients::of(r.config.objective, &r.params).map(|c| c.a).unwrap_or(r.params.a);
    b.push(Check::le(
        &format!("{label}_pohozaev"),
        "|P| <= 10 el_residual a |grad u|^2 at the computed critical point",
        r.pohozaev_residual.abs(),
        10.0 * r.el_residual * a * r.tuple.grad2,
    ));
    if r.params.mu != 0.0 {
        b.push(Check::le(
            &format!("{label}_multiplier"),
            "tangency multiplier matches mu(1-delta_q)|u|_q^q/c within 1e-6",
            r.multiplier_gap(),
            1e-6,
        ));
    }
}

fn perturbed(p: &ProblemParams, t: &ThresholdSet, depth: Depth, b: &mut Builder) {
    let ls = Landscape::new(*p, t.cq);
    let claim = "h1(xi_+^mu) > 0, the checked sufficient smallness condition on mu";
    let plus = b.or_error("h1_sufficient", claim, need(t.xi_plus_mu, "xi_+^mu"));
    let h1 = b.or_error("h1_sufficient", claim, ls.h1_poly());
    let (Some(plus), Some(h1)) = (plus, h1) else {
        return;
    };
    b.push(Check::gt("h1_sufficient", claim, h1.eval(plus), 0.0).with("xi_plus_mu", plus));
    let Some(z) = t.xi0_mu1 else {
        return;
    };
    let (r0, rm) = (t.xi0_mu.unwrap_or(f64::NAN), t.xi_minus_mu.unwrap_or(f64::NAN));
    b.push(Check::lt("root_order", "xi_0^mu < xi_0^{mu,1}", r0, z));
    b.push(Check::lt("root_order", "xi_0^{mu,1} < xi_-^mu", z, rm));
    b.push(Check::lt("root_order", "xi_-^mu < xi_+^mu", rm, plus));
    if depth == Depth::Quick {
        return;
    }
    let claim = "a local minimizer with negative energy exists";
    let Some(r) = b.or_error("minimizer", claim, local_minimizer(p, Objective::I)) else {
        return;
    };
    b.artifacts.push(Artifact::flow("minimizer", &r));
    b.push(Check::lt("minimizer_energy", "m(b, mu) < 0", r.energy, 0.0));
    b.push(Check::gt("minimizer_multiplier", "lambda > 0", r.multiplier, 0.0));
    b.push(Check::lt("minimizer_region", "|grad u|^2 < (xi_0^{mu,1})^2", r.tuple.grad2, z * z));
    let negative = r.field.values[..r.field.values.len() - 1].iter().filter(|&&v| v <= 0.0).count();
    b.push(Check::count("minimizer_positive", "the minimizer is positive", negative, 0));
    flow_certificates(b, "minimizer", &r);
    let mus: Vec<f64> = (0..4).map(|i| p.mu * 10f64.powf(-(i as f64) / 3.0)).collect();
    let runs = mu_sweep(p, &mus);
    let mut rows = Vec::new();
    for (mu, run) in mus.iter().zip(runs) {
        match run {
            Ok(r) => rows.push((r.energy, r.tuple.grad2)),
            Err(e) => {
                b.push(Check::error("mu_trend", "minimizers along a decade of mu", format!("mu = {mu:e}: {e}")));
                return;
            }
        }
    }
    let claim = "|m(b, mu)| and |grad u|^2 decrease toward 0 as mu decreases";
    let breaks = rows.windows(2).filter(|w| !(w[1].0.abs() < w[0].0.abs() && w[1].1 < w[0].1)).count();
    let mut check = Check::count("mu_trend", claim, breaks, 0);
    for (mu, (e, g)) in mus.iter().zip(&rows) {
        check = check.with(&format!("energy@{mu:e}"), *e).with(&format!("grad2@{mu:e}"), *g);
    }
    b.push(check);
}

fn four_dim_minimizers(p: &ProblemParams, t: &ThresholdSet, depth: Depth, mountain_pass: bool, b: &mut Builder) {
    let (Some(c0), Some(k0)) = (t.c0, t.k0) else {
        b.push(Check::error("thresholds", "k0 and c0", t.notes.join("; ")));
        return;
    };
    b.push(Check::lt("mass_below_c0", "c < c0", p.c, c0));
    let ls = Landscape::new(*p, t.cq);
    if let (Some(kc), Ok(fc)) = (t.k_c, ls.fc_poly(p.c)) {
        b.push(Check::gt("fc_at_kc", "f_c(k_c) > 0 for c < c0", fc.eval(kc), 0.0).with("k_c", kc));
    }
    let mut barrier = None;
    if mountain_pass {
        if let Some(c1) = t.c1 {
            b.push(Check::lt("mass_below_c1", "c < c1", p.c, c1));
        }
        if let Some(d) = b.or_error("barrier", "k0 f_c(k0) bounds I from below on the region boundary", region_barrier(p)) {
            b.push(Check::gt("barrier", "k0 f_c(k0) > 0 on the region boundary", d, 0.0).with("k0", k0));
            barrier = Some(d);
        }
    }
    if depth == Depth::Quick {
        return;
    }
    let i_min = b.or_error("minimizer_i", "local minimizer of I in the region", local_minimizer(p, Objective::I));
    let j_min = b.or_error("minimizer_j", "local minimizer of J in the region", local_minimizer(p, Objective::J));
    for (label, r) in [("minimizer_i", &i_min), ("minimizer_j", &j_min)] {
        let Some(r) = r else { continue };
        b.artifacts.push(Artifact::flow(label, r));
        b.push(Check::lt(&format!("{label}_energy"), "the local minimum is negative", r.energy, 0.0));
        b.push(Check::lt(&format!("{label}_region"), "|grad u|^2 < k0", r.tuple.grad2, k0));
        flow_certificates(b, label, r);
    }
    let Some(j) = j_min else { return };
    b.push(Check::le("j_above_i", "J(u) >= I(u) at the J-minimizer", j.energy_i, j.energy));
    if !mountain_pass {
        return;
    }
    let Some(i) = i_min else { return };
    let claim = "sup_t I(W_{n,t}) < m_bar(c) + Lambda";
    let Some(path) = b.or_error("path_threshold", claim, best_w_path(p, &j, i.energy, &W_PATH_NS)) else {
        return;
    };
    b.artifacts.push(Artifact::path("bubble path", &path));
    if let Some(cmp) = &path.comparison {
        let err = path.quadrature_error.unwrap_or(0.0);
        b.push(
            Check::lt("path_threshold", claim, path.sup_level, cmp.threshold)
                .with("m_bar", cmp.m_bar)
                .with("Lambda", cmp.lambda)
                .with("n", path.n.unwrap_or(0) as f64)
                .against_error(cmp.margin, err),
        );
    }
    b.push(Check::lt("path_endpoint", "the path ends below 2m(c)", path.endpoints.1, 2.0 * i.energy));
    if let Some(d) = barrier {
        b.push(Check::lt("level_sandwich", "the barrier lies below every path sup", d, path.sup_level));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{b0, b1};

    fn all_pass(r: &RegimeReport) {
        for c in &r.checks {
            assert_eq!(c.status, CheckStatus::Pass, "{c:?}");
        }
        assert!(r.passed);
    }

    #[test]
    fn two_levels_pass_between_b1_and_b0() {
        let b = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
        let r = verify(&ProblemParams::new(5, 1.0, b, 0.0, 2.5, 1.0).unwrap(), Depth::Quick).unwrap();
        assert_eq!(r.regime_tag, RegimeTag::PureCriticalTwoLevels);
        assert!(r.checks.len() >= 8);
        all_pass(&r);
    }

    #[test]
    fn nonexistence_and_negative_b() {
        let r = verify(&ProblemParams::new(5, 1.0, 2.0 * b0(5, 1.0), 0.0, 2.5, 1.0).unwrap(), Depth::Quick).unwrap();
        assert_eq!(r.regime_tag, RegimeTag::PureCriticalNonexistence);
        all_pass(&r);
        let r = verify(&ProblemParams::new(6, 1.0, -0.3, 0.0, 2.5, 1.0).unwrap(), Depth::Quick).unwrap();
        assert_eq!(r.regime_tag, RegimeTag::PureCriticalNegativeB);
        all_pass(&r);
    }

    #[test]
    fn defocusing_samples_sit_above_the_plus_level() {
        let b = 0.5 * b0(5, 1.0);
        let r = verify(&ProblemParams::new(5, 1.0, b, -0.5, 3.0, 1.0).unwrap(), Depth::Quick).unwrap();
        assert_eq!(r.regime_tag, RegimeTag::Defocusing);
        all_pass(&r);
        let r = verify(&ProblemParams::new(5, 1.0, 3.0 * b0(5, 1.0), -0.5, 3.0, 1.0).unwrap(), Depth::Quick).unwrap();
        all_pass(&r);
    }

    #[test]
    fn four_dim_probes() {
        let s2 = sobolev_constant(4).powi(2);
        for bs2 in [0.3, 0.9, 1.0, 2.0] {
            let r = verify(&ProblemParams::new(4, 1.0, bs2 / s2, 0.0, 2.5, 1.0).unwrap(), Depth::Quick).unwrap();
            assert_eq!(r.regime_tag, RegimeTag::FourDimPureCritical);
            all_pass(&r);
        }
    }

    #[test]
    fn quick_reports_for_minimizer_regimes() {
        let c = 0.01f64;
        let b = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
        let r = verify(&ProblemParams::new(5, 1.0, b, 1.0 / c.powf(0.625), 2.5, c).unwrap(), Depth::Quick).unwrap();
        assert_eq!(r.alias.is_some(), true);
        all_pass(&r);
        let big = verify(&ProblemParams::new(5, 1.0, b, 20.0 / c.powf(0.625), 2.5, c).unwrap(), Depth::Quick).unwrap();
        assert!(!big.passed);
        let bad = big.failures().next().unwrap();
        assert_eq!(bad.name, "h1_sufficient");
        assert!(bad.lhs.is_some() && bad.rhs.is_some());

        let s2 = sobolev_constant(4).powi(2);
        let base = ProblemParams::new(4, 1.0, 0.5 / s2, 1.0, 2.5, 1.0).unwrap();
        let t = thresholds(&base, Some(gn_constant(4, 2.5).unwrap())).unwrap();
        let p = base.with_c(0.5 * t.c0.unwrap().min(t.c1.unwrap()));
        let r = verify(&p, Depth::Quick).unwrap();
        assert_eq!(r.regime_tag, RegimeTag::FourDimMountainPass);
        all_pass(&r);
    }

    #[test]
    fn reports_are_reproducible_and_inadmissible_points_are_rejected() {
        let p = ProblemParams::new(5, 1.0, 0.5 * b0(5, 1.0), 0.0, 2.5, 1.0).unwrap();
        let a = serde_json::to_string(&verify(&p, Depth::Quick).unwrap()).unwrap();
        let b = serde_json::to_string(&verify(&p, Depth::Quick).unwrap()).unwrap();
        assert_eq!(a, b);
        let edge = p.with_b(b0(5, 1.0));
        assert!(matches!(verify(&edge, Depth::Quick), Err(Error::Regime(_))));
    }

    #[test]
    #[ignore = "runs flows; exercised by the acceptance suite"]
    fn full_perturbed_report() {
        let c = 0.01f64;
        let b = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
        let r = verify(&ProblemParams::new(5, 1.0, b, 1.0 / c.powf(0.625), 2.5, c).unwrap(), Depth::Full).unwrap();
        all_pass(&r);
    }
}
