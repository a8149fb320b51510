//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use kirchhoff_core::functionals::{
    energy_j, fiber_project, gn_constant, gn_grid, Objective,
};
use kirchhoff_core::params::{critical_exponent, delta};
use kirchhoff_core::radial::{
    make_bubble, truncated_bubble_norms, GridSpec, RadialField, RadialGrid, DEFAULT_CELLS,
};
use kirchhoff_core::regime::{lambda_quotient, linear_fit, verify, CheckStatus, Depth, RegimeReport, RegimeTag};
use kirchhoff_core::scalar::{b0, b1, sobolev_constant, thresholds, Landscape};
use kirchhoff_core::solver::{
    best_w_path, bubble_tuple, local_minimizer, mu_sweep, region_barrier, FlowResult, FlowStatus,
};
use kirchhoff_core::{Error, ProblemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn all_pass(r: &RegimeReport) -> Result<(), String> {
    for c in &r.checks {
        ensure(
            c.status == CheckStatus::Pass,
            format!("{} is {:?}: {:?} vs {:?} {}", c.name, c.status, c.lhs, c.rhs, c.detail.clone().unwrap_or_default()),
        )?;
    }
    Ok(())
}

fn check_value(r: &RegimeReport, name: &str) -> Option<f64> {
    r.checks.iter().find(|c| c.name == name).and_then(|c| c.lhs)
}

fn sobolev_self_consistency() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut lowest_order = f64::INFINITY;
    for n in [4u32, 5, 6] {
        let s = sobolev_constant(n).powf(n as f64 / 2.0);
        let errors = |cells: usize| {
            let g = RadialGrid::new(GridSpec::for_bubble(n, 1.0, cells)).unwrap();
            let u = make_bubble(&g, 1.0);
            let grad = g.grad2(&u.values);
            let crit = g.lumped_power(&u.values, critical_exponent(n));
            rel(grad, s).max(rel(crit, s)).max(rel(grad, crit))
        };
        let (coarse, fine) = (errors(DEFAULT_CELLS / 2), errors(DEFAULT_CELLS));
        let order = (coarse / fine).log2();
        ensure(fine < 1e-4, format!("N={n}: disagreement {fine:e} >= 1e-4"))?;
        ensure(order >= 1.8, format!("N={n}: grid-doubling order {order:.3} < 1.8"))?;
        worst = worst.max(fine);
        lowest_order = lowest_order.min(order);
    }
    Ok(format!("max relative disagreement {worst:.2e} on {DEFAULT_CELLS} cells, lowest doubling order {lowest_order:.3}"))
}

fn n4_threshold_collapse() -> Verdict {
    let s = sobolev_constant(4);
    for a in [0.5, 1.0, 2.0] {
        let target = 1.0 / (s * s);
        ensure(b0(4, a) == target && b1(4, a) == target, format!("a={a}: b0={:e}, b1={:e}, S^-2={target:e}", b0(4, a), b1(4, a)))?;
    }
    Ok(format!("b0 = b1 = S^-2 = {:.12e} exactly for a in {{0.5, 1, 2}}", 1.0 / (s * s)))
}

fn two_level_structure() -> Verdict {
    let (lo, hi) = (b1(5, 1.0), b0(5, 1.0));
    let mut dev: f64 = 0.0;
    for k in 1..=5 {
        let b = lo + k as f64 * (hi - lo) / 6.0;
        let p = ProblemParams::new(5, 1.0, b, 0.0, 2.5, 1.0).unwrap();
        let r = verify(&p, Depth::Quick).map_err(|e| e.to_string())?;
        ensure(r.regime_tag == RegimeTag::PureCriticalTwoLevels, format!("b={b:e} tagged {}", r.regime_tag))?;
        all_pass(&r).map_err(|e| format!("b={b:e}: {e}"))?;
        let t = &r.thresholds;
        let (cm, cp) = (t.c_n_minus.unwrap(), t.c_n_plus.unwrap());
        for (name, target) in [("minus_level", cm), ("plus_level", cp), ("path_sup", cm)] {
            dev = dev.max(rel(check_value(&r, name).unwrap(), target));
        }
    }
    ensure(dev < 5e-3, format!("level deviation {dev:e}"))?;
    Ok(format!("5 samples in (b1, b0): two roots (minus, plus), c- > c+ > 0, max level/path deviation {dev:.2e}"))
}

fn nonexistence() -> Verdict {
    let top = b0(5, 1.0);
    for k in [1.01, 2.0, 10.0] {
        let p = ProblemParams::new(5, 1.0, k * top, 0.0, 2.5, 1.0).unwrap();
        let r = verify(&p, Depth::Quick).map_err(|e| e.to_string())?;
        ensure(r.regime_tag == RegimeTag::PureCriticalNonexistence, format!("{k}b0 tagged {}", r.regime_tag))?;
        all_pass(&r).map_err(|e| format!("{k}b0: {e}"))?;
        let fiber = fiber_project(&bubble_tuple(5, 2.5, 1.0).unwrap(), &p);
        ensure(matches!(fiber, Err(Error::NoRootFound(_))), format!("{k}b0: fiber projection gave {fiber:?}"))?;
    }
    Ok("b in {1.01, 2, 10}b0: min f > 0, f and the bubble's fiber report NoRootFound".into())
}

fn negative_b() -> Verdict {
    let mut levels = Vec::new();
    for b in [-1e-5, -1e-3, -0.1] {
        let p = ProblemParams::new(5, 1.0, b, 0.0, 2.5, 1.0).unwrap();
        let r = verify(&p, Depth::Quick).map_err(|e| e.to_string())?;
        ensure(r.regime_tag == RegimeTag::PureCriticalNegativeB, format!("b={b} tagged {}", r.regime_tag))?;
        all_pass(&r).map_err(|e| format!("b={b}: {e}"))?;
        levels.push(r.thresholds.c_n.unwrap());
    }
    Ok(format!("b in {{-1e-5, -1e-3, -0.1}}: one minus root each, c_N = {levels:?}", levels = levels.iter().map(|l| format!("{l:.4e}")).collect::<Vec<_>>()))
}

fn certificates(flows: &[(String, FlowResult)]) -> Verdict {
    let mut worst_p: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for (label, r) in flows {
        ensure(r.status == FlowStatus::Converged, format!("{label}: {:?}", r.status))?;
        ensure(r.pohozaev_certificate(), format!("{label}: |P| = {:e}, residual {:e}", r.pohozaev_residual, r.el_residual))?;
        let a = if r.config.objective == Objective::J {
            r.params.a / (1.0 - r.params.b * sobolev_constant(4).powi(2))
        } else {
            r.params.a
        };
        worst_p = worst_p.max(r.pohozaev_residual.abs() / (r.el_residual * a * r.tuple.grad2));
        if r.params.mu != 0.0 {
            ensure(r.multiplier_gap() <= 1e-6, format!("{label}: multiplier gap {:e}", r.multiplier_gap()))?;
            worst_gap = worst_gap.max(r.multiplier_gap());
        }
    }
    Ok(format!(
        "{} converged flows: max |P|/(res a G) = {worst_p:.3}, max multiplier gap {worst_gap:.2e}",
        flows.len()
    ))
}

fn perturbed_params() -> ProblemParams {
    let c = 0.01f64;
    let b = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
    ProblemParams::new(5, 1.0, b, 1.0 / c.powf(0.625), 2.5, c).unwrap()
}

fn perturbed_minimizer(flows: &mut Vec<(String, FlowResult)>) -> Verdict {
    let p = perturbed_params();
    let r = local_minimizer(&p, Objective::I).map_err(|e| e.to_string())?;
    ensure(r.energy < 0.0 && r.multiplier > 0.0, format!("energy {:e}, lambda {:e}", r.energy, r.multiplier))?;
    ensure(r.is_positive(), "minimizer changes sign")?;
    let line = format!("m = {:.4e}, lambda = {:.4e}", r.energy, r.multiplier);
    flows.push(("N=5 minimizer".into(), r));
    let mus: Vec<f64> = (0..4).map(|k| p.mu * 10f64.powf(-(k as f64) / 3.0)).collect();
    let mut rows = Vec::new();
    for (mu, run) in mus.iter().zip(mu_sweep(&p, &mus)) {
        let r = run.map_err(|e| format!("mu={mu:e}: {e}"))?;
        rows.push((r.energy, r.tuple.grad2));
        flows.push((format!("N=5 mu={mu:.4e}"), r));
    }
    for w in rows.windows(2) {
        ensure(w[1].0.abs() < w[0].0.abs() && w[1].1 < w[0].1, format!("trend broken: {rows:?}"))?;
    }
    Ok(format!(
        "{line}; over one decade of mu |m| {:.3e} -> {:.3e}, |grad u|^2 {:.3e} -> {:.3e}",
        rows[0].0.abs(),
        rows[3].0.abs(),
        rows[0].1,
        rows[3].1
    ))
}

fn n4_point(b_s2: f64, q: f64, c_frac: f64, use_min: bool) -> (ProblemParams, f64) {
    let s2 = sobolev_constant(4).powi(2);
    let base = ProblemParams::new(4, 1.0, b_s2 / s2, 1.0, q, 1.0).unwrap();
    let t = thresholds(&base, Some(gn_constant(4, q).unwrap())).unwrap();
    let (c0, c1) = (t.c0.unwrap(), t.c1.unwrap());
    let c = c_frac * if use_min { c0.min(c1) } else { c0 };
    (base.with_c(c), t.k0.unwrap())
}

fn n4_minimizers(flows: &mut Vec<(String, FlowResult)>) -> Verdict {
    let (p, k0) = n4_point(0.5, 2.5, 0.5, false);
    let i = local_minimizer(&p, Objective::I).map_err(|e| format!("I: {e}"))?;
    let j = local_minimizer(&p, Objective::J).map_err(|e| format!("J: {e}"))?;
    for (name, r) in [("I", &i), ("J", &j)] {
        ensure(r.tuple.grad2 < k0 && r.energy < 0.0, format!("{name}: |grad|^2 {:e} vs k0 {k0:e}, energy {:e}", r.tuple.grad2, r.energy))?;
    }
    let j_at_i = energy_j(&i.tuple, &p).unwrap();
    ensure(j.energy >= j.energy_i && j_at_i >= i.energy, "J < I at a minimizer")?;
    let line = format!(
        "I-min {:.4e}, J-min {:.4e} (I there {:.4e}), both inside |grad u|^2 < k0 = {k0:.3e}",
        i.energy, j.energy, j.energy_i
    );
    flows.push(("N=4 I-minimizer".into(), i));
    flows.push(("N=4 J-minimizer".into(), j));
    Ok(line)
}

fn mountain_pass_threshold(flows: &mut Vec<(String, FlowResult)>) -> Verdict {
    let mut parts = Vec::new();
    for (b_s2, q, frac) in [(0.5, 2.5, 0.5), (0.25, 2.3, 0.3), (0.7, 2.7, 0.6)] {
        let (p, _) = n4_point(b_s2, q, frac, true);
        let tag = format!("bS^2={b_s2},q={q}");
        let i = local_minimizer(&p, Objective::I).map_err(|e| format!("{tag} I: {e}"))?;
        let j = local_minimizer(&p, Objective::J).map_err(|e| format!("{tag} J: {e}"))?;
        let path = best_w_path(&p, &j, i.energy, &[10, 20, 40, 80]).map_err(|e| format!("{tag}: {e}"))?;
        let cmp = path.comparison.clone().ok_or("missing comparison")?;
        let err = path.quadrature_error.unwrap_or(f64::INFINITY);
        ensure(cmp.margin > err, format!("{tag}: margin {:e} vs quadrature error {err:e}", cmp.margin))?;
        let d = region_barrier(&p).map_err(|e| e.to_string())?;
        ensure(d > 0.0, format!("{tag}: barrier {d:e}"))?;
        parts.push(format!("{tag}: margin {:.3} (n={}, err {err:.1e}), barrier {d:.2}", cmp.margin, path.n.unwrap_or(0)));
        flows.push((format!("{tag} I"), i));
        flows.push((format!("{tag} J"), j));
    }
    Ok(parts.join("; "))
}

fn truncation_asymptotics() -> Verdict {
    let s2 = sobolev_constant(4).powi(2);
    let mut seqs = [Vec::new(), Vec::new(), Vec::new()];
    for n in [10u32, 20, 40, 80, 160, 320] {
        let t = truncated_bubble_norms(n);
        let nf = n as f64;
        seqs[0].push(t.mass2 * nf * nf / (1.0 + nf * nf).ln());
        seqs[1].push((t.grad2 - s2) * nf * nf);
        seqs[2].push((t.l4 - s2) * nf.powi(4));
    }
    let mut spreads = Vec::new();
    for (name, s) in ["mass", "gradient", "L4"].iter().zip(&seqs) {
        let mx = s.iter().fold(0f64, |a, v| a.max(v.abs()));
        let mn = s.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        ensure(mn > 0.0 && mx / mn < 10.0, format!("{name} ratios {s:?}"))?;
        spreads.push(format!("{name} {:.3}", mx / mn));
    }
    Ok(format!("max/min ratio spreads over n = 10..320: {}", spreads.join(", ")))
}

fn pure_critical_probes() -> Verdict {
    let s2 = sobolev_constant(4).powi(2);
    for b_s2 in [1.0, 2.0] {
        let p = ProblemParams::new(4, 1.0, b_s2 / s2, 0.0, 2.5, 1.0).unwrap();
        let r = verify(&p, Depth::Quick).map_err(|e| e.to_string())?;
        all_pass(&r).map_err(|e| format!("bS^2={b_s2}: {e}"))?;
        ensure(r.checks.iter().any(|c| c.name == "energy_positive"), "random-field check missing")?;
    }
    let eps = [0.2, 0.1, 0.05];
    let mut fits = Vec::new();
    for b_s2 in [0.1, 0.3] {
        let lambda = s2 / (4.0 * (1.0 - b_s2));
        let qs: Vec<f64> = eps.iter().map(|&e| lambda_quotient(1.0, b_s2 / s2, e)).collect();
        ensure(qs[0] > qs[1] && qs[1] > qs[2] && qs[2] > lambda, format!("bS^2={b_s2}: {qs:?} vs {lambda}"))?;
        let (_, intercept, r2) = linear_fit(&eps, &qs);
        ensure(r2 > 0.99, format!("bS^2={b_s2}: R^2 = {r2}"))?;
        fits.push(format!("bS^2={b_s2}: R^2 {r2:.5}, intercept/Lambda {:.4}", intercept / lambda));
    }
    Ok(format!("b >= S^-2: I > 0 on 100 fields, dilations decay to 0; {}", fits.join("; ")))
}

fn gn_property_suite() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, q) in [(4u32, 2.5), (5, 2.5), (5, 3.0)] {
        let cq = gn_constant(n, q).map_err(|e| e.to_string())?;
        let spec = gn_grid(n);
        let grid = RadialGrid::new(spec).unwrap();
        let d = delta(n, q);
        let mut rng = ChaCha8Rng::seed_from_u64(11 + n as u64);
        for _ in 0..200 {
            let k = rng.gen_range(1..5);
            let bumps: Vec<(f64, f64, f64)> =
                (0..k).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..5.0), rng.gen_range(0.2..3.0))).collect();
            let u = RadialField::from_fn(&grid, |r| {
                if r >= spec.r_max {
                    0.0
                } else {
                    bumps.iter().map(|(a, m, s)| a * (-((r - m) / s).powi(2)).exp()).sum::<f64>()
                }
            });
            let t = u.norm_tuple(q);
            let bound = cq.powf(q) * t.grad2.powf(q * d / 2.0) * t.mass2.powf(q * (1.0 - d) / 2.0);
            ensure(t.lq <= bound * (1.0 + 1e-8), format!("N={n}, q={q}: |u|_q^q {:e} > bound {bound:e}", t.lq))?;
            worst = worst.max(t.lq / bound);
        }
    }
    let (p, _) = n4_point(0.5, 2.5, 0.5, false);
    let cq = gn_constant(4, 2.5).unwrap();
    let t = thresholds(&p, Some(cq)).unwrap();
    let ls = Landscape::new(p, Some(cq));
    let kc = t.k_c.unwrap();
    let fc = ls.fc_poly(p.c).unwrap();
    let ks: Vec<f64> = (0..=4000).map(|i| kc * 10f64.powf(-2.0 + 4.0 * i as f64 / 4000.0)).collect();
    let (idx, _) = ks.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &k)| {
        let v = fc.eval(k);
        if v > bv {
            (i, v)
        } else {
            (bi, bv)
        }
    });
    let spacing = ks[idx + 1] - ks[idx];
    ensure((ks[idx] - kc).abs() <= spacing, format!("argmax {:e} vs k_c {kc:e}", ks[idx]))?;
    let c0 = t.c0.unwrap();
    let sign = |c: f64| {
        let q = p.with_c(c);
        let tq = thresholds(&q, Some(cq)).unwrap();
        Landscape::new(q, Some(cq)).fc_poly(c).unwrap().eval(tq.k_c.unwrap())
    };
    let (below, above) = (sign(0.9 * c0), sign(1.1 * c0));
    ensure(below > 0.0 && above < 0.0, format!("f_c(k_c) = {below:e} at 0.9c0, {above:e} at 1.1c0"))?;
    Ok(format!(
        "600 fields, max |u|_q^q / bound = {worst:.9}; f_c argmax within one sample of k_c; f_c(k_c) = {below:.3e} / {above:.3e} at 0.9c0 / 1.1c0"
    ))
}

fn guarded<F: FnOnce() -> Verdict>(f: F) -> Verdict {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => Err(format!(
            "panicked: {}",
            e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
        )),
    }
}

fn main() {
    let mut flows = Vec::new();
    let clock = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = vec![
        (1, "Sobolev self-consistency", guarded(sobolev_self_consistency)),
        (2, "N=4 threshold collapse", guarded(n4_threshold_collapse)),
        (3, "pure-critical two-level structure", guarded(two_level_structure)),
        (4, "nonexistence for b > b0", guarded(nonexistence)),
        (5, "single level for b < 0", guarded(negative_b)),
    ];
    let seven = guarded(|| perturbed_minimizer(&mut flows));
    let eight = guarded(|| n4_minimizers(&mut flows));
    let nine = guarded(|| mountain_pass_threshold(&mut flows));
    results.push((6, "critical-point certificates", guarded(|| certificates(&flows))));
    results.push((7, "N>=5 perturbed minimizer", seven));
    results.push((8, "N=4 local minimizers", eight));
    results.push((9, "mountain-pass threshold", nine));
    results.push((10, "truncation asymptotics", guarded(truncation_asymptotics)));
    results.push((11, "N=4 pure-critical probes", guarded(pure_critical_probes)));
    results.push((12, "Gagliardo-Nirenberg property suite", guarded(gn_property_suite)));
    let mut failed = 0;
    println!();
    for (id, name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed in {:.1} s", results.len() - failed, results.len(), clock.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
