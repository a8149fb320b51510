//! One-parameter sweeps producing regime-map rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::CheckStatus;
use super::verify::{verify, Depth};
use super::{classify, RegimeTag};
use crate::error::{Error, Result};
use crate::functionals::gn_constant;
use crate::params::ProblemParams;
use crate::scalar::{thresholds, Landscape, ThresholdSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    B,
    C,
    Mu,
    Q,
}

impl SweepAxis {
    pub fn apply(self, base: &ProblemParams, value: f64) -> ProblemParams {
        match self {
            SweepAxis::B => base.with_b(value),
            SweepAxis::C => base.with_c(value),
            SweepAxis::Mu => base.with_mu(value),
            SweepAxis::Q => base.with_q(value),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::B => "b",
            SweepAxis::C => "c",
            SweepAxis::Mu => "mu",
            SweepAxis::Q => "q",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b" => Ok(SweepAxis::B),
            "c" => Ok(SweepAxis::C),
            "mu" => Ok(SweepAxis::Mu),
            "q" => Ok(SweepAxis::Q),
            other => Err(Error::Format(format!("sweep axis must be one of b, c, mu, q; got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub regime_tag: RegimeTag,
    pub violated: Option<String>,
    pub thresholds: Option<ThresholdSet>,
    /// `f_c(k_c)` (N = 4, μ > 0).
    pub fc_at_kc: Option<f64>,
    pub passed: Option<bool>,
    pub checks: Vec<(String, CheckStatus)>,
    pub error: Option<String>,
}

fn row(axis: SweepAxis, value: f64, base: &ProblemParams, depth: Depth) -> SweepRow {
    let p = axis.apply(base, value);
    let class = classify(&p);
    let mut out = SweepRow {
        axis,
        value,
        regime_tag: class.tag,
        violated: class.violated.clone(),
        thresholds: None,
        fc_at_kc: None,
        passed: None,
        checks: vec![],
        error: None,
    };
    if let Err(e) = p.validate() {
        out.error = Some(e.to_string());
        return out;
    }
    let cq = if p.mu > 0.0 && (p.n == 4 || p.q < p.two_star()) { gn_constant(p.n, p.q).ok() } else { None };
    match thresholds(&p, cq) {
        Ok(t) => {
            if p.n == 4 {
                if let (Some(kc), Ok(fc)) = (t.k_c, Landscape::new(p, cq).fc_poly(p.c)) {
                    out.fc_at_kc = Some(fc.eval(kc));
                }
            }
            out.thresholds = Some(t);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    if class.tag == RegimeTag::Inadmissible {
        return out;
    }
    match verify(&p, depth) {
        Ok(r) => {
            out.passed = Some(r.passed);
            out.checks = r.checks.into_iter().map(|c| (c.name, c.status)).collect();
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// One row per value, in input order; failures are recorded in the row.
pub fn sweep(axis: SweepAxis, values: &[f64], base: &ProblemParams, depth: Depth) -> Vec<SweepRow> {
    values.par_iter().map(|&v| row(axis, v, base, depth)).collect()
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "axis,value,regime,violated,passed,pass,marginal,fail,error_checks,b0,b1,c_n_minus,c_n_plus,Lambda,c0,c1,k_c,fc_at_kc,error\n",
    );
    for r in rows {
        let t = r.thresholds.as_ref();
        let n = |s: CheckStatus| r.checks.iter().filter(|(_, c)| *c == s).count();
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        let fields = [
            r.axis.name().to_string(),
            format!("{:e}", r.value),
            r.regime_tag.to_string(),
            r.violated.as_deref().map(quote).unwrap_or_default(),
            r.passed.map(|b| b.to_string()).unwrap_or_default(),
            n(CheckStatus::Pass).to_string(),
            n(CheckStatus::Marginal).to_string(),
            n(CheckStatus::Fail).to_string(),
            n(CheckStatus::Error).to_string(),
            cell(t.map(|t| t.b0)),
            cell(t.map(|t| t.b1)),
            cell(t.and_then(|t| t.c_n_minus)),
            cell(t.and_then(|t| t.c_n_plus)),
            cell(t.and_then(|t| t.lambda)),
            cell(t.and_then(|t| t.c0)),
            cell(t.and_then(|t| t.c1)),
            cell(t.and_then(|t| t.k_c)),
            cell(r.fc_at_kc),
            r.error.as_deref().map(quote).unwrap_or_default(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
