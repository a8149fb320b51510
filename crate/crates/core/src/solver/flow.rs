//! Mass-constrained descent with a positivity-preserving preconditioned step.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::functionals::{multiplier, Coefficients, NormTuple, Objective};
use crate::params::ProblemParams;
use crate::radial::{solve_tridiagonal, RadialField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Initial step fraction in `(0, 1]`.
    pub step: f64,
    pub max_iters: usize,
    /// Relative Euler–Lagrange residual at which the flow stops.
    pub residual_tol: f64,
    /// Upper bound on `|∇u|₂²`.
    pub region_cap: Option<f64>,
    pub objective: Objective,
    pub record_trajectory: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            max_iters: 50_000,
            residual_tol: 1e-8,
            region_cap: None,
            objective: Objective::I,
            record_trajectory: false,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::InvalidParams(format!("flow step must lie in (0, 1], got {}", self.step)));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParams("residual_tol must be > 0".into()));
        }
        if let Some(cap) = self.region_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidParams("region cap must be > 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowStatus {
    Converged,
    RegionExit,
    Stalled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub iter: usize,
    pub energy: f64,
    pub grad2: f64,
    pub residual: f64,
}

fn as_snapshot<S: Serializer>(u: &RadialField, s: S) -> std::result::Result<S::Ok, S::Error> {
    u.snapshot().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowResult {
    pub params: ProblemParams,
    pub config: FlowConfig,
    pub grid_signature: String,
    #[serde(serialize_with = "as_snapshot")]
    pub field: RadialField,
    pub tuple: NormTuple,
    /// Value of the flow's objective.
    pub energy: f64,
    /// `I` at the final field, equal to `energy` for the `I` objective.
    pub energy_i: f64,
    /// `λ` from the tangency condition.
    pub multiplier: f64,
    /// `μ(1−δ_q)|u|_q^q/c`.
    pub multiplier_closed_form: f64,
    /// Pohozaev functional of the objective at the final field.
    pub pohozaev_residual: f64,
    pub el_residual: f64,
    pub iters: usize,
    pub status: FlowStatus,
    pub message: Option<String>,
    pub near_degenerate: Vec<String>,
    pub trajectory: Vec<TrajectoryRow>,
}

impl FlowResult {
    /// `|P| ≤ 10·el_residual·a·|∇u|₂²`.
    pub fn pohozaev_certificate(&self) -> bool {
        let a = Coefficients::of(self.config.objective, &self.params).map(|c| c.a).unwrap_or(self.params.a);
        self.pohozaev_residual.abs() <= 10.0 * self.el_residual * a * self.tuple.grad2
    }

    /// Relative gap between the tangency multiplier and its closed form.
    pub fn multiplier_gap(&self) -> f64 {
        (self.multiplier - self.multiplier_closed_form).abs() / self.multiplier_closed_form.abs()
    }

    pub fn is_positive(&self) -> bool {
        let v = &self.field.values;
        v[..v.len() - 1].iter().all(|&x| x > 0.0)
    }

    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("iter,energy,grad2,residual\n");
        for r in &self.trajectory {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", r.iter, r.energy, r.grad2, r.residual));
        }
        out
    }
}

struct State {
    u: Vec<f64>,
    tuple: NormTuple,
    energy: f64,
    lambda: f64,
    coef: f64,
    grad: Vec<f64>,
    residual: f64,
}

struct Model<'a> {
    field: &'a RadialField,
    k: Coefficients,
    c: f64,
    last: usize,
}

impl Model<'_> {
    fn state(&self, u: Vec<f64>) -> State {
        let g = &self.field.grid;
        let k = &self.k;
        let w = g.weights();
        let tuple = NormTuple {
            grad2: g.grad2(&u),
            mass2: g.lumped_power(&u, 2.0),
            lq: g.lumped_power(&u, k.q),
            l2star: g.lumped_power(&u, k.p),
        };
        let coef = k.a + k.b * tuple.grad2;
        let lambda = -(coef * tuple.grad2 - k.mu * tuple.lq - tuple.l2star) / tuple.mass2;
        let ku = g.stiffness_apply(&u);
        let mut grad = vec![0.0; u.len()];
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.last {
            let v = u[i];
            let av = v.abs();
            let lin = coef * ku[i];
            let r = lin - w[i] * (k.mu * av.powf(k.q - 2.0) * v + av.powf(k.p - 2.0) * v - lambda * v);
            grad[i] = r;
            num += r * r / w[i];
            den += lin * lin / w[i];
        }
        let residual = if den > 0.0 { (num / den).sqrt() } else { f64::INFINITY };
        State { energy: k.energy(&tuple), u, tuple, lambda, coef, grad, residual }
    }

    fn direction(&self, s: &State) -> Vec<f64> {
        let g = &self.field.grid;
        let sigma = s.lambda.max(0.0);
        let (mut diag, mut off) = g.operator_bands(s.coef, sigma);
        if self.k.mu < 0.0 {
            let w = g.weights();
            for i in 0..self.last {
                diag[i] += -self.k.mu * w[i] * s.u[i].abs().powf(self.k.q - 2.0);
            }
        }
        diag[self.last] = 1.0;
        off[self.last - 1] = 0.0;
        let mut d = solve_tridiagonal(&diag, &off, &s.grad);
        d.iter_mut().for_each(|x| *x = -*x);
        d[self.last] = 0.0;
        d
    }

    fn normalize(&self, mut u: Vec<f64>) -> Vec<f64> {
        let m = self.field.grid.lumped_power(&u, 2.0);
        let k = (self.c / m).sqrt();
        u.iter_mut().for_each(|x| *x *= k);
        u
    }
}

/// Preconditioned descent of the objective on `{|u|₂² = c}`.
///
/// The search direction is `−P⁻¹g` with `P = (a+bG)K + max(λ,0)W` (plus
/// `|μ|W|u|^{q−2}` when `μ < 0`) and `g` the constrained gradient; for steps up to
/// one this keeps positive fields positive. Steps are followed by exact mass
/// renormalization and accepted under an Armijo test.
pub fn gradient_flow(init: &RadialField, params: &ProblemParams, config: &FlowConfig) -> Result<FlowResult> {
    params.validate()?;
    config.validate()?;
    if init.grid.dim() != params.n {
        return Err(Error::InvalidParams(format!("field dimension {} != N = {}", init.grid.dim(), params.n)));
    }
    let k = Coefficients::of(config.objective, params)?;
    let last = init.grid.len() - 1;
    let model = Model { field: init, k, c: params.c, last };
    let mut u0 = init.values.clone();
    u0[last] = 0.0;
    if init.grid.lumped_power(&u0, 2.0) == 0.0 {
        return Err(Error::ZeroField);
    }
    let mut s = model.state(model.normalize(u0));
    if let Some(cap) = config.region_cap {
        if s.tuple.grad2 >= cap {
            return Err(Error::InvalidParams(format!(
                "initial |grad u|^2 = {:e} not below the region cap {cap:e}",
                s.tuple.grad2
            )));
        }
    }
    let mut trajectory = Vec::new();
    let mut alpha = config.step;
    let mut status = FlowStatus::Stalled;
    let mut message = Some(format!("iteration limit {} reached", config.max_iters));
    let mut iters = 0;
    while iters < config.max_iters {
        if config.record_trajectory {
            trajectory.push(TrajectoryRow { iter: iters, energy: s.energy, grad2: s.tuple.grad2, residual: s.residual });
        }
        if s.residual <= config.residual_tol {
            status = FlowStatus::Converged;
            message = None;
            break;
        }
        iters += 1;
        let d = model.direction(&s);
        let slope: f64 = s.grad.iter().zip(&d).map(|(a, b)| a * b).sum();
        let noise = 64.0
            * f64::EPSILON
            * (k.a * s.tuple.grad2 + k.b.abs() * s.tuple.grad2.powi(2) + k.mu.abs() * s.tuple.lq + s.tuple.l2star);
        alpha = (2.0 * alpha).min(config.step);
        let mut next = None;
        while alpha >= 1e-10 {
            let trial: Vec<f64> = s.u.iter().zip(&d).map(|(x, y)| x + alpha * y).collect();
            let t = model.state(model.normalize(trial));
            let armijo = t.energy <= s.energy + 1e-4 * alpha * slope;
            let flat = (t.energy - s.energy).abs() <= noise && t.residual < s.residual;
            if t.energy.is_finite() && (armijo || flat) {
                next = Some(t);
                break;
            }
            alpha *= 0.5;
        }
        let Some(t) = next else {
            message = Some(format!("line search floor reached at residual {:e}", s.residual));
            break;
        };
        s = t;
        if let Some(cap) = config.region_cap {
            if s.tuple.grad2 >= cap {
                status = FlowStatus::RegionExit;
                message = Some(format!("|grad u|^2 = {:e} crossed the cap {cap:e}", s.tuple.grad2));
                break;
            }
        }
    }
    let field = RadialField::new(init.grid.clone(), s.u)?;
    let energy_i = Coefficients::of(Objective::I, params)?.energy(&s.tuple);
    Ok(FlowResult {
        params: *params,
        config: *config,
        grid_signature: init.grid.signature(),
        tuple: s.tuple,
        energy: s.energy,
        energy_i,
        multiplier: s.lambda,
        multiplier_closed_form: multiplier(&s.tuple, params),
        pohozaev_residual: k.pohozaev(&s.tuple, params.delta_q()),
        el_residual: s.residual,
        iters,
        status,
        message,
        near_degenerate: Vec::new(),
        trajectory,
        field,
    })
}
