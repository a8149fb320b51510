//! Individual inequality checks with their computed sides.

use serde::{Deserialize, Serialize};

/// Relative margin below which a strict inequality is only `marginal`.
pub const MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Marginal,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "~=")]
    Close,
    #[serde(rename = "==")]
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The statement being checked.
    pub claim: String,
    pub relation: Relation,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// Further named quantities behind the verdict.
    pub values: Vec<(String, f64)>,
    pub status: CheckStatus,
    pub detail: Option<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Check {
    fn new(name: &str, claim: &str, relation: Relation, lhs: f64, rhs: f64, status: CheckStatus) -> Self {
        Self {
            name: name.into(),
            claim: claim.into(),
            relation,
            lhs: finite(lhs),
            rhs: finite(rhs),
            values: vec![],
            status,
            detail: None,
        }
    }

    /// `lhs > rhs`, marginal within `MARGIN` relative.
    pub fn gt(name: &str, claim: &str, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let m = lhs - rhs;
        let status = if !m.is_finite() {
            CheckStatus::Error
        } else if m > MARGIN * scale {
            CheckStatus::Pass
        } else if m >= -MARGIN * scale {
            CheckStatus::Marginal
        } else {
            CheckStatus::Fail
        };
        Self::new(name, claim, Relation::Gt, lhs, rhs, status)
    }

    pub fn lt(name: &str, claim: &str, lhs: f64, rhs: f64) -> Self {
        Self { relation: Relation::Lt, ..Self::gt(name, claim, rhs, lhs) }.swapped()
    }

    fn swapped(mut self) -> Self {
        std::mem::swap(&mut self.lhs, &mut self.rhs);
        self
    }

    pub fn le(name: &str, claim: &str, lhs: f64, rhs: f64) -> Self {
        let status = if !(lhs.is_finite() && rhs.is_finite()) {
            CheckStatus::Error
        } else if lhs <= rhs {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self::new(name, claim, Relation::Le, lhs, rhs, status)
    }

    /// `|lhs − rhs| ≤ tol·|rhs|`.
    pub fn close(name: &str, claim: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::close_on(name, claim, lhs, rhs, tol, rhs.abs())
    }

    /// `|lhs − rhs| ≤ tol·scale`.
    pub fn close_on(name: &str, claim: &str, lhs: f64, rhs: f64, tol: f64, scale: f64) -> Self {
        let status = if !(lhs.is_finite() && rhs.is_finite()) {
            CheckStatus::Error
        } else if (lhs - rhs).abs() <= tol * scale {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self::new(name, claim, Relation::Close, lhs, rhs, status).with("tolerance", tol)
    }

    pub fn count(name: &str, claim: &str, found: usize, expected: usize) -> Self {
        let status = if found == expected { CheckStatus::Pass } else { CheckStatus::Fail };
        Self::new(name, claim, Relation::Eq, found as f64, expected as f64, status)
    }

    pub fn error(name: &str, claim: &str, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            claim: claim.into(),
            relation: Relation::Eq,
            lhs: None,
            rhs: None,
            values: vec![],
            status: CheckStatus::Error,
            detail: Some(err.to_string()),
        }
    }

    /// Marks a decided check marginal when `|gap| ≤ MARGIN·scale`.
    pub fn tie_within(mut self, gap: f64, scale: f64) -> Self {
        if self.status != CheckStatus::Error && gap.abs() <= MARGIN * scale {
            self.status = CheckStatus::Marginal;
        }
        self
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            self.values.push((key.into(), value));
        }
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.detail = Some(text.into());
        self
    }

    /// Downgrades a pass to marginal when `margin` does not exceed `error`.
    pub fn against_error(mut self, margin: f64, error: f64) -> Self {
        self = self.with("error_estimate", error);
        if self.status == CheckStatus::Pass && margin <= error {
            self.status = CheckStatus::Marginal;
        }
        self
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, CheckStatus::Fail | CheckStatus::Error)
    }
}
