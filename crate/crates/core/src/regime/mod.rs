//! Parameter-regime classification and per-regime verification reports.

mod checks;
mod probes;
mod sweep;
mod verify;

use serde::{Deserialize, Serialize};

use crate::params::ProblemParams;
use crate::scalar::{b0, sobolev_constant};

pub use checks::{Check, CheckStatus, Relation, MARGIN};
pub use probes::{cut_bubble_norms, cutoff, cutoff_derivative, lambda_quotient, linear_fit, probe_window, random_fields};
pub use sweep::{sweep, sweep_csv, SweepAxis, SweepRow};
pub use verify::{verify, Artifact, Depth, RegimeReport, REPORT_SCHEMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    #[serde(rename = "Th2.1(i)")]
    PureCriticalTwoLevels,
    #[serde(rename = "Th2.1(ii)")]
    PureCriticalNegativeB,
    #[serde(rename = "Th2.1(iii)")]
    PureCriticalNonexistence,
    #[serde(rename = "Th2.3")]
    Defocusing,
    #[serde(rename = "Th2.4")]
    FourDimPureCritical,
    #[serde(rename = "Th2.5")]
    FourDimLocalMinimizer,
    #[serde(rename = "Th2.6(=3.1)")]
    PerturbedMinimizer,
    #[serde(rename = "Th2.7")]
    FourDimMountainPass,
    #[serde(rename = "inadmissible")]
    Inadmissible,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 9] = [
        RegimeTag::PureCriticalTwoLevels,
        RegimeTag::PureCriticalNegativeB,
        RegimeTag::PureCriticalNonexistence,
        RegimeTag::Defocusing,
        RegimeTag::FourDimPureCritical,
        RegimeTag::FourDimLocalMinimizer,
        RegimeTag::PerturbedMinimizer,
        RegimeTag::FourDimMountainPass,
        RegimeTag::Inadmissible,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::PureCriticalTwoLevels => "Th2.1(i)",
            RegimeTag::PureCriticalNegativeB => "Th2.1(ii)",
            RegimeTag::PureCriticalNonexistence => "Th2.1(iii)",
            RegimeTag::Defocusing => "Th2.3",
            RegimeTag::FourDimPureCritical => "Th2.4",
            RegimeTag::FourDimLocalMinimizer => "Th2.5",
            RegimeTag::PerturbedMinimizer => "Th2.6(=3.1)",
            RegimeTag::FourDimMountainPass => "Th2.7",
            RegimeTag::Inadmissible => "inadmissible",
        }
    }

    /// Case-insensitive; accepts `th2.7`, `2.7`, `th2.1(i)`, and `3.1`/`2.6` for the same tag.
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim().to_ascii_lowercase();
        let t = t.strip_prefix("th").unwrap_or(&t);
        Some(match t {
            "2.1(i)" | "2.1i" => RegimeTag::PureCriticalTwoLevels,
            "2.1(ii)" | "2.1ii" => RegimeTag::PureCriticalNegativeB,
            "2.1(iii)" | "2.1iii" => RegimeTag::PureCriticalNonexistence,
            "2.3" => RegimeTag::Defocusing,
            "2.4" => RegimeTag::FourDimPureCritical,
            "2.5" => RegimeTag::FourDimLocalMinimizer,
            "2.6" | "3.1" | "2.6(=3.1)" => RegimeTag::PerturbedMinimizer,
            "2.7" => RegimeTag::FourDimMountainPass,
            "inadmissible" => RegimeTag::Inadmissible,
            _ => return None,
        })
    }
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: RegimeTag,
    /// Strict inequality that failed, for inadmissible points.
    pub violated: Option<String>,
    /// Further tags whose hypotheses also hold.
    pub also: Vec<RegimeTag>,
}

impl Classification {
    fn tag(tag: RegimeTag) -> Self {
        Self { tag, violated: None, also: vec![] }
    }

    fn reject(why: impl Into<String>) -> Self {
        Self { tag: RegimeTag::Inadmissible, violated: Some(why.into()), also: vec![] }
    }
}

/// Deterministic tag from the hypothesis table. Total: invalid parameters map to
/// `inadmissible` with the validation message.
pub fn classify(params: &ProblemParams) -> Classification {
    if let Err(e) = params.validate() {
        return Classification::reject(e.to_string());
    }
    let p = params;
    let nf = p.n as f64;
    if p.n >= 5 {
        let b0v = b0(p.n, p.a);
        if p.mu == 0.0 {
            return if p.b < 0.0 {
                Classification::tag(RegimeTag::PureCriticalNegativeB)
            } else if p.b == 0.0 {
                Classification::reject("b != 0")
            } else if p.b < b0v {
                Classification::tag(RegimeTag::PureCriticalTwoLevels)
            } else if p.b == b0v {
                Classification::reject("b < b0 or b > b0")
            } else {
                Classification::tag(RegimeTag::PureCriticalNonexistence)
            };
        }
        if p.mu < 0.0 {
            return if p.b > 0.0 { Classification::tag(RegimeTag::Defocusing) } else { Classification::reject("b > 0") };
        }
        let b1v = crate::scalar::b1(p.n, p.a);
        if !(p.b > b1v) {
            return Classification::reject("b1 < b");
        }
        if !(p.b < b0v) {
            return Classification::reject("b < b0");
        }
        if !(p.q < 2.0 + 4.0 / nf) {
            return Classification::reject("q < 2 + 4/N");
        }
        return Classification::tag(RegimeTag::PerturbedMinimizer);
    }
    let s2 = sobolev_constant(4).powi(2);
    if p.mu == 0.0 {
        return if p.b > 0.0 { Classification::tag(RegimeTag::FourDimPureCritical) } else { Classification::reject("b > 0") };
    }
    if p.mu < 0.0 {
        return Classification::reject("mu > 0 (N = 4)");
    }
    if !(p.b > 0.0) {
        return Classification::reject("0 < b");
    }
    if !(p.b * s2 < 1.0) {
        return Classification::reject("b < S^-2");
    }
    if !(p.q < 3.0) {
        return Classification::reject("q < 3");
    }
    let Ok(cq) = crate::functionals::gn_constant(4, p.q) else {
        return Classification::reject("C_q unavailable");
    };
    let Ok(t) = crate::scalar::thresholds(p, Some(cq)) else {
        return Classification::reject("thresholds unavailable");
    };
    let (Some(c0), Some(c1)) = (t.c0, t.c1) else {
        return Classification::reject("c0, c1 unavailable");
    };
    if !(p.c < c0) {
        return Classification::reject("c < c0");
    }
    if p.c < c1 {
        Classification { tag: RegimeTag::FourDimMountainPass, violated: None, also: vec![RegimeTag::FourDimLocalMinimizer] }
    } else {
        Classification::tag(RegimeTag::FourDimLocalMinimizer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::b1;

    fn p(n: u32, b: f64, mu: f64, q: f64, c: f64) -> ProblemParams {
        ProblemParams::new(n, 1.0, b, mu, q, c).unwrap()
    }

    #[test]
    fn pure_critical_table() {
        let b0v = b0(5, 1.0);
        assert_eq!(classify(&p(5, 2.0 * b0v, 0.0, 2.5, 1.0)).tag, RegimeTag::PureCriticalNonexistence);
        assert_eq!(classify(&p(5, 0.5 * b0v, 0.0, 2.5, 1.0)).tag, RegimeTag::PureCriticalTwoLevels);
        assert_eq!(classify(&p(5, -0.1, 0.0, 2.5, 1.0)).tag, RegimeTag::PureCriticalNegativeB);
        let edge = classify(&p(5, b0v, 0.0, 2.5, 1.0));
        assert_eq!(edge.tag, RegimeTag::Inadmissible);
        assert!(edge.violated.unwrap().contains("b0"));
    }

    #[test]
    fn perturbed_and_defocusing() {
        assert_eq!(classify(&p(5, 0.01, -1.0, 3.0, 1.0)).tag, RegimeTag::Defocusing);
        let mid = 0.5 * (b0(5, 1.0) + b1(5, 1.0));
        assert_eq!(classify(&p(5, mid, 0.1, 2.5, 1.0)).tag, RegimeTag::PerturbedMinimizer);
        assert_eq!(classify(&p(5, mid, 0.1, 2.9, 1.0)).violated.as_deref(), Some("q < 2 + 4/N"));
        assert_eq!(classify(&p(5, b1(5, 1.0), 0.1, 2.5, 1.0)).violated.as_deref(), Some("b1 < b"));
    }

    #[test]
    fn four_dimensional_table() {
        let s2 = sobolev_constant(4).powi(2);
        assert_eq!(classify(&p(4, 2.0 / s2, 0.0, 2.5, 1.0)).tag, RegimeTag::FourDimPureCritical);
        let base = p(4, 0.5 / s2, 1.0, 2.5, 1.0);
        let t = crate::scalar::thresholds(&base, Some(crate::functionals::gn_constant(4, 2.5).unwrap())).unwrap();
        let (c0, c1) = (t.c0.unwrap(), t.c1.unwrap());
        let small = classify(&base.with_c(0.5 * c0.min(c1)));
        assert_eq!(small.tag, RegimeTag::FourDimMountainPass);
        assert!(small.also.contains(&RegimeTag::FourDimLocalMinimizer));
        assert_eq!(classify(&base.with_c(1.01 * c0)).violated.as_deref(), Some("c < c0"));
        assert_eq!(classify(&base.with_q(3.2)).violated.as_deref(), Some("q < 3"));
        assert_eq!(classify(&p(4, 0.5 / s2, -1.0, 2.5, 1.0)).tag, RegimeTag::Inadmissible);
    }

    #[test]
    fn tags_round_trip_through_text() {
        for t in RegimeTag::ALL {
            assert_eq!(RegimeTag::parse(t.as_str()), Some(t));
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.as_str()));
        }
        assert_eq!(RegimeTag::parse("th2.7"), Some(RegimeTag::FourDimMountainPass));
        assert_eq!(RegimeTag::parse("3.1"), Some(RegimeTag::PerturbedMinimizer));
        assert_eq!(RegimeTag::parse("th9"), None);
    }
}
