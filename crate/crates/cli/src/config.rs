//! Run configuration: a JSON file, overridden by flags, resolved against thresholds.

use std::path::{Path, PathBuf};

use kirchhoff_core::params::critical_exponent;
use kirchhoff_core::functionals::Objective;
use kirchhoff_core::solver::{FlowConfig, FLOW_TOL};
use kirchhoff_core::ProblemParams;
use serde::{Deserialize, Serialize};

use crate::expr::{uses_mass_thresholds, Resolver, Value};
use crate::CliError;

/// Parameter values as written, each a number or a threshold expression.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamInput {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Value>,
}

impl ParamInput {
    /// Fields of `self` win over `other`.
    pub fn over(self, other: ParamInput) -> ParamInput {
        ParamInput {
            n: self.n.or(other.n),
            a: self.a.or(other.a),
            b: self.b.or(other.b),
            mu: self.mu.or(other.mu),
            q: self.q.or(other.q),
            c: self.c.or(other.c),
        }
    }

    pub fn resolve(&self) -> Result<ProblemParams, CliError> {
        let n = self.n.unwrap_or(5);
        let num = |v: &Option<Value>, default: f64, what: &str| -> Result<f64, CliError> {
            match v {
                None => Ok(default),
                Some(Value::Num(x)) => Ok(*x),
                Some(Value::Expr(s)) => Err(CliError::Usage(format!("{what} must be a number, got {s:?}"))),
            }
        };
        let a = num(&self.a, 1.0, "a")?;
        let ts = critical_exponent(n);
        let q_default = if ts > 3.0 { 2.5 } else { 0.5 * (2.0 + ts) };
        let q = num(&self.q, q_default, "q")?;
        let mu = num(&self.mu, 0.0, "mu")?;
        let mut p = ProblemParams { n, a, b: 0.0, mu, q, c: 1.0 };
        let b = self.b.clone().unwrap_or_else(|| Value::Expr("0.5b0".into()));
        if uses_mass_thresholds(&b) {
            return Err(CliError::Usage("b cannot refer to c0, c1 or cmin".into()));
        }
        p.b = Resolver { params: &p }.eval(&b)?;
        let c = self.c.clone().unwrap_or(Value::Num(1.0));
        p.c = Resolver { params: &p }.eval(&c)?;
        p.validate().map_err(CliError::Core)?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    /// Fixed outer radius; without it flows regrid until the decay is resolved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Length below which the mesh is uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_trajectory: Option<bool>,
}

impl FlowInput {
    pub fn over(self, other: FlowInput) -> FlowInput {
        FlowInput {
            step: self.step.or(other.step),
            max_iters: self.max_iters.or(other.max_iters),
            residual_tol: self.residual_tol.or(other.residual_tol),
            region_cap: self.region_cap.or(other.region_cap),
            objective: self.objective.or(other.objective),
            record_trajectory: self.record_trajectory.or(other.record_trajectory),
        }
    }

    /// Unset fields take the library defaults, with the minimizer tolerance.
    pub fn resolve(&self) -> Result<FlowConfig, CliError> {
        let d = FlowConfig { residual_tol: FLOW_TOL, ..FlowConfig::default() };
        let cfg = FlowConfig {
            step: self.step.unwrap_or(d.step),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
            region_cap: self.region_cap.or(d.region_cap),
            objective: self.objective.unwrap_or(d.objective),
            record_trajectory: self.record_trajectory.unwrap_or(d.record_trajectory),
        };
        cfg.validate().map_err(CliError::Core)?;
        Ok(cfg)
    }
}

impl GridInput {
    pub fn over(self, other: GridInput) -> GridInput {
        GridInput {
            cells: self.cells.or(other.cells),
            r_max: self.r_max.or(other.r_max),
            core: self.core.or(other.core),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// JSON documents only.
    Json,
    /// JSON documents plus CSV tables.
    #[default]
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Contents of a config file; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub params: ParamInput,
    #[serde(default)]
    pub grid: GridInput,
    #[serde(default)]
    pub flow: FlowInput,
    #[serde(default)]
    pub output: OutputInput,
    #[serde(default)]
    pub verbosity: Option<u8>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// The fully resolved configuration echoed into every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub params: ProblemParams,
    /// Parameter values as written, before threshold resolution.
    pub inputs: ParamInput,
    pub grid: GridInput,
    pub flow: FlowConfig,
    pub output_dir: PathBuf,
    pub format: Format,
    pub verbosity: u8,
    /// Command-specific options.
    pub options: serde_json::Value,
}
