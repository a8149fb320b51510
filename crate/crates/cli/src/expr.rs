//! Threshold-relative parameter values such as `0.5b0`, `b1+0.1*Sm2` or `0.9cmin`.

use kirchhoff_core::functionals::gn_constant;
use kirchhoff_core::scalar::{b0, b1, sobolev_constant, thresholds};
use kirchhoff_core::ProblemParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SYMBOLS: [&str; 6] = ["Sm2", "b0", "b1", "c0", "c1", "cmin"];

/// A number or a linear combination of threshold symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Expr(String),
}

impl Value {
    pub fn parse(text: &str) -> Self {
        match text.trim().parse::<f64>() {
            Ok(x) => Value::Num(x),
            Err(_) => Value::Expr(text.trim().to_string()),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{x}"),
            Value::Expr(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    coef: f64,
    symbol: Option<&'static str>,
}

fn bad(text: &str, why: &str) -> CliError {
    CliError::Usage(format!("cannot read {text:?} as a value: {why}"))
}

fn split_terms(text: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        let exponent_sign = matches!(prev, Some('e' | 'E')) && cur.chars().rev().nth(1).is_some_and(|c| c.is_ascii_digit() || c == '.');
        if (ch == '+' || ch == '-') && !exponent_sign && !cur.is_empty() {
            out.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() && !exponent_sign {
            negative ^= ch == '-';
        } else {
            cur.push(ch);
        }
        prev = Some(ch);
    }
    out.push((negative, cur));
    out
}

fn parse_terms(text: &str) -> Result<Vec<Term>, CliError> {
    let mut terms = Vec::new();
    for (negative, raw) in split_terms(text) {
        if raw.is_empty() {
            return Err(bad(text, "empty term"));
        }
        let symbol = SYMBOLS.iter().copied().filter(|s| raw.ends_with(s)).max_by_key(|s| s.len());
        let head = match symbol {
            Some(s) => raw[..raw.len() - s.len()].trim_end_matches('*'),
            None => raw.as_str(),
        };
        let coef = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().map_err(|_| bad(text, &format!("unknown term {raw:?}; symbols are {}", SYMBOLS.join(", "))))?
        };
        terms.push(Term { coef: if negative { -coef } else { coef }, symbol });
    }
    Ok(terms)
}

/// Symbol values for a partially resolved parameter point.
pub struct Resolver<'a> {
    pub params: &'a ProblemParams,
}

impl Resolver<'_> {
    fn symbol(&self, s: &str) -> Result<f64, CliError> {
        let p = self.params;
        match s {
            "Sm2" => Ok(sobolev_constant(p.n).powi(-2)),
            "b0" => Ok(b0(p.n, p.a)),
            "b1" => Ok(b1(p.n, p.a)),
            _ => {
                let probe = p.with_c(1.0);
                let cq = gn_constant(p.n, p.q).map_err(CliError::Core)?;
                let t = thresholds(&probe, Some(cq)).map_err(CliError::Core)?;
                let missing = || {
                    CliError::Usage(format!(
                        "{s} is undefined at N = {}, b = {:e}, mu = {}, q = {} (needs N = 4, 0 < b < S^-2, mu > 0, q < 3)",
                        p.n, p.b, p.mu, p.q
                    ))
                };
                let (c0, c1) = (t.c0.ok_or_else(missing)?, t.c1.ok_or_else(missing)?);
                Ok(match s {
                    "c0" => c0,
                    "c1" => c1,
                    _ => c0.min(c1),
                })
            }
        }
    }

    pub fn eval(&self, v: &Value) -> Result<f64, CliError> {
        match v {
            Value::Num(x) => Ok(*x),
            Value::Expr(text) => {
                let mut sum = 0.0;
                for t in parse_terms(text)? {
                    sum += t.coef * t.symbol.map(|s| self.symbol(s)).transpose()?.unwrap_or(1.0);
                }
                Ok(sum)
            }
        }
    }
}

/// Whether the value refers to `c0`, `c1` or `cmin`, which need the other parameters first.
pub fn uses_mass_thresholds(v: &Value) -> bool {
    matches!(v, Value::Expr(s) if s.contains('c'))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ProblemParams {
        ProblemParams::new(5, 1.0, 0.0, 0.0, 2.5, 1.0).unwrap()
    }

    #[test]
    fn linear_combinations() {
        let params = p();
        let r = Resolver { params: &params };
        let (b0v, b1v) = (b0(5, 1.0), b1(5, 1.0));
        assert_eq!(r.eval(&Value::parse("0.5b0")).unwrap(), 0.5 * b0v);
        assert_eq!(r.eval(&Value::parse("2*b0")).unwrap(), 2.0 * b0v);
        assert_eq!(r.eval(&Value::parse("b1")).unwrap(), b1v);
        assert!((r.eval(&Value::parse("0.5b0 + 0.5b1")).unwrap() - 0.5 * (b0v + b1v)).abs() < 1e-18);
        assert_eq!(r.eval(&Value::parse("-0.3b0")).unwrap(), -0.3 * b0v);
        assert_eq!(r.eval(&Value::parse("1e-3")).unwrap(), 1e-3);
        assert!((r.eval(&Value::parse("1e-3b0-2.5e-1b1")).unwrap() - (1e-3 * b0v - 0.25 * b1v)).abs() < 1e-18);
        assert_eq!(r.eval(&Value::parse("Sm2")).unwrap(), sobolev_constant(5).powi(-2));
    }

    #[test]
    fn unknown_symbols_and_missing_thresholds() {
        let params = p();
        let r = Resolver { params: &params };
        assert!(r.eval(&Value::parse("0.5b2")).is_err());
        assert!(r.eval(&Value::parse("0.5c0")).is_err());
        let four = ProblemParams::new(4, 1.0, 0.5 / sobolev_constant(4).powi(2), 1.0, 2.5, 1.0).unwrap();
        let r = Resolver { params: &four };
        let c0 = r.eval(&Value::parse("c0")).unwrap();
        let c1 = r.eval(&Value::parse("c1")).unwrap();
        assert_eq!(r.eval(&Value::parse("cmin")).unwrap(), c0.min(c1));
    }

    #[test]
    fn values_serialize_as_numbers_or_strings() {
        assert_eq!(serde_json::to_string(&Value::parse("2")).unwrap(), "2.0");
        assert_eq!(serde_json::to_string(&Value::parse("0.5b0")).unwrap(), "\"0.5b0\"");
        let v: Value = serde_json::from_str("\"b1\"").unwrap();
        assert_eq!(v, Value::Expr("b1".into()));
    }
}
