//! `kirchhoff`: thresholds, fiber maps, flows, mountain-pass paths, regime checks and sweeps
//! for normalized solutions of the critical Kirchhoff equation.

mod config;
mod expr;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kirchhoff_core::functionals::{fiber_project, gn_constant, Objective};
use kirchhoff_core::radial::{GridSpec, RadialField, RadialGrid};
use kirchhoff_core::regime::{classify, sweep, sweep_csv, verify, Depth, RegimeTag, SweepAxis};
use kirchhoff_core::scalar::thresholds;
use kirchhoff_core::solver::{
    best_w_path, bubble_tuple, flow_adaptive, gaussian_start, gradient_flow, local_minimizer, minimizer_region,
    mp_level_estimate, mp_path_mu0, start_grad2, FlowStatus, FLOW_CELLS, PATH_SAMPLES,
};
use kirchhoff_core::{Error, ProblemParams};
use serde_json::json;

use config::{FileConfig, FlowInput, Format, GridInput, ParamInput, RunConfig};
use expr::{Resolver, Value};
use output::OutDir;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    ChecksFailed(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 1 failed checks, 2 invalid input, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                Error::InvalidParams(_) | Error::Regime(_) | Error::Format(_) | Error::MissingGnConstant => 2,
                Error::Io(_) => 4,
                _ => 3,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "kirchhoff", version, about = "Normalized solutions of the critical Kirchhoff equation")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: kirchhoff-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps and path families.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(subcommand)]
    command: Command,
}

/// Values accept threshold symbols: `0.5b0`, `b1+0.1Sm2`, `0.9c0`, `0.5cmin`.
#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Dimension.
    #[arg(long = "N", global = true)]
    n: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
}

impl ParamArgs {
    fn input(&self) -> ParamInput {
        let v = |s: &Option<String>| s.as_deref().map(Value::parse);
        ParamInput { n: self.n, a: v(&self.a), b: v(&self.b), mu: v(&self.mu), q: v(&self.q), c: v(&self.c) }
    }
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Number of grid cells.
    #[arg(long, global = true)]
    cells: Option<usize>,
    /// Fixed outer radius (disables regridding).
    #[arg(long, global = true)]
    r_max: Option<f64>,
    /// Width of the uniform inner mesh.
    #[arg(long, global = true)]
    core: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Bubble,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PathChoice {
    /// Bubble dilations (`N >= 5`, `mu = 0`).
    Mu0,
    /// Bubble added to the local minimizer (`N = 4`, `mu > 0`).
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    I,
    J,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Thresholds and the regime of a parameter point.
    Constants,
    /// Fiber-map roots of a field.
    Fiber {
        #[arg(long, value_enum, default_value = "bubble")]
        source: Source,
        /// Field snapshot (`.json`) or `r,value` table (`.csv`).
        #[arg(long, required_if_eq("source", "file"))]
        field: Option<PathBuf>,
    },
    /// Mass-constrained descent to a critical point.
    Flow {
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Relative Euler-Lagrange residual to stop at.
        #[arg(long)]
        tol: Option<f64>,
        /// Upper bound on the gradient norm squared [default: the minimizer region].
        #[arg(long)]
        cap: Option<f64>,
        #[arg(long)]
        trajectory: bool,
    },
    /// Explicit mountain-pass path and its level bounds.
    Mp {
        #[arg(long, value_enum)]
        path: Option<PathChoice>,
        /// Truncation indices tried for the bubble path.
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        ns: Vec<u32>,
        #[arg(long, default_value_t = PATH_SAMPLES)]
        samples: usize,
    },
    /// Check list of the regime the parameters fall in.
    Verify {
        /// Expected regime (`th2.7`, `th2.1(i)`, `3.1`, ...); fills unset parameters
        /// with a default sample of that regime.
        #[arg(long)]
        regime: Option<String>,
        #[arg(long, default_value = "quick")]
        depth: String,
    },
    /// One-parameter sweep of regime reports.
    Sweep {
        #[arg(long)]
        axis: String,
        /// Comma-separated values; threshold symbols allowed.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = "quick")]
        depth: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Fiber { .. } => "fiber",
            Command::Flow { .. } => "flow",
            Command::Mp { .. } => "mp",
            Command::Verify { .. } => "verify",
            Command::Sweep { .. } => "sweep",
        }
    }
}

fn sample_of(tag: RegimeTag) -> ParamInput {
    let e = |s: &str| Some(Value::Expr(s.into()));
    let n = |x: f64| Some(Value::Num(x));
    let (dim, b, mu, q, c) = match tag {
        RegimeTag::PureCriticalTwoLevels => (5, e("0.5b0+0.5b1"), n(0.0), n(2.5), n(1.0)),
        RegimeTag::PureCriticalNegativeB => (5, e("-0.5b0"), n(0.0), n(2.5), n(1.0)),
        RegimeTag::PureCriticalNonexistence => (5, e("2b0"), n(0.0), n(2.5), n(1.0)),
        RegimeTag::Defocusing => (5, e("0.5b0"), n(-1.0), n(3.0), n(1.0)),
        RegimeTag::FourDimPureCritical => (4, e("0.5Sm2"), n(0.0), n(2.5), n(1.0)),
        RegimeTag::FourDimLocalMinimizer => (4, e("0.5Sm2"), n(1.0), n(2.5), e("0.5c0")),
        RegimeTag::PerturbedMinimizer => (5, e("0.5b0+0.5b1"), n(0.01f64.powf(-0.625)), n(2.5), n(0.01)),
        RegimeTag::FourDimMountainPass => (4, e("0.5Sm2"), n(1.0), n(2.5), e("0.5cmin")),
        RegimeTag::Inadmissible => return ParamInput::default(),
    };
    ParamInput { n: Some(dim), a: n(1.0), b, mu, q, c }
}

struct Setup {
    config: RunConfig,
    out: OutDir,
}

fn setup(cli: &Cli, options: serde_json::Value, regime: Option<RegimeTag>) -> Result<Setup, CliError> {
    let started = std::time::Instant::now();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut inputs = cli.params.input().over(file.params);
    if let Some(tag) = regime {
        inputs = inputs.over(sample_of(tag));
    }
    let params = inputs.resolve()?;
    let flow_flags = match &cli.command {
        Command::Flow { objective, step, max_iters, tol, cap, trajectory } => FlowInput {
            step: *step,
            max_iters: *max_iters,
            residual_tol: *tol,
            region_cap: *cap,
            objective: objective.map(|o| if o == ObjectiveArg::J { Objective::J } else { Objective::I }),
            record_trajectory: trajectory.then_some(true),
        },
        _ => FlowInput::default(),
    };
    let flow = flow_flags.over(file.flow).resolve()?;
    let grid = GridInput { cells: cli.grid.cells, r_max: cli.grid.r_max, core: cli.grid.core }.over(file.grid);
    let output_dir = cli.out.clone().or(file.output.dir).unwrap_or_else(|| PathBuf::from("kirchhoff-out"));
    let format = cli.format.or(file.output.format).unwrap_or_default();
    let config = RunConfig {
        command: cli.command.name().into(),
        params,
        inputs,
        grid,
        flow,
        output_dir: output_dir.clone(),
        format,
        verbosity: cli.verbose.max(file.verbosity.unwrap_or(0)),
        options,
    };
    let mut out = OutDir::create(&output_dir, format, started)?;
    out.lap("resolve");
    Ok(Setup { config, out })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    let (options, regime) = match &cli.command {
        Command::Constants => (json!({}), None),
        Command::Fiber { source, field } => (json!({"source": format!("{source:?}").to_lowercase(), "field": field}), None),
        Command::Flow { .. } => (json!({}), None),
        Command::Mp { path, ns, samples } => {
            (json!({"path": path.map(|p| format!("{p:?}").to_lowercase()), "ns": ns, "samples": samples}), None)
        }
        Command::Verify { regime, depth } => {
            let tag = match regime {
                Some(r) => Some(RegimeTag::parse(r).ok_or_else(|| CliError::Usage(format!("unknown regime {r:?}")))?),
                None => None,
            };
            depth.parse::<Depth>()?;
            (json!({"regime": tag.map(|t| t.as_str()), "depth": depth.to_lowercase()}), tag)
        }
        Command::Sweep { axis, values, depth } => {
            axis.parse::<SweepAxis>()?;
            depth.parse::<Depth>()?;
            (json!({"axis": axis.to_lowercase(), "values": values, "depth": depth.to_lowercase()}), None)
        }
    };
    let Setup { config, mut out } = setup(cli, options, regime)?;
    let outcome = dispatch(cli, &config, &mut out);
    let written = out.finish(&config, &outcome);
    outcome.and(written)
}

fn dispatch(cli: &Cli, cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let p = cfg.params;
    let verbose = cfg.verbosity > 0;
    let result = match &cli.command {
        Command::Constants => cmd_constants(cfg, &p, out),
        Command::Fiber { source, field } => cmd_fiber(cfg, &p, *source, field.as_deref(), out),
        Command::Flow { .. } => cmd_flow(cfg, &p, out),
        Command::Mp { path, ns, samples } => cmd_mp(cfg, &p, *path, ns, *samples, out),
        Command::Verify { depth, .. } => cmd_verify(cfg, &p, depth.parse()?, out),
        Command::Sweep { axis, values, depth } => cmd_sweep(cfg, &p, axis.parse()?, values, depth.parse()?, out),
    };
    out.lap("run");
    if verbose {
        eprintln!("outputs in {}", out.path().display());
    }
    result
}

fn cq_for(p: &ProblemParams) -> Result<Option<f64>, CliError> {
    Ok(if p.mu > 0.0 { Some(gn_constant(p.n, p.q)?) } else { None })
}

fn cmd_constants(cfg: &RunConfig, p: &ProblemParams, out: &mut OutDir) -> Result<(), CliError> {
    let t = thresholds(p, cq_for(p)?)?;
    let class = classify(p);
    println!("N = {}, a = {}, b = {:e}, mu = {}, q = {}, c = {:e}", p.n, p.a, p.b, p.mu, p.q, p.c);
    println!("regime  {}", class.tag);
    if let Some(v) = &class.violated {
        println!("violates  {v}");
    }
    let table = serde_json::to_value(&t).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(map) = table.as_object() {
        for (k, v) in map {
            match v {
                serde_json::Value::Number(x) => println!("{k:<12}{:e}", x.as_f64().unwrap_or(f64::NAN)),
                serde_json::Value::Array(notes) => {
                    for n in notes {
                        println!("note        {}", n.as_str().unwrap_or_default());
                    }
                }
                _ => {}
            }
        }
    }
    out.json("constants.json", cfg, json!({"classification": class, "thresholds": t}))
}

fn load_field(path: &std::path::Path, n: u32) -> Result<RadialField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let field = if path.extension().is_some_and(|e| e == "json") {
        RadialField::from_json(&text)?
    } else {
        RadialField::from_csv(n, &text)?
    };
    if field.grid.dim() != n {
        return Err(CliError::Usage(format!("field is {}-dimensional, parameters have N = {n}", field.grid.dim())));
    }
    Ok(field)
}

fn cmd_fiber(
    cfg: &RunConfig,
    p: &ProblemParams,
    source: Source,
    field: Option<&std::path::Path>,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let tuple = match source {
        Source::Bubble => {
            if p.n == 4 {
                return Err(CliError::Usage("the bubble has infinite mass for N = 4; use --source file".into()));
            }
            bubble_tuple(p.n, p.q, p.c)?
        }
        Source::File => {
            let path = field.ok_or_else(|| CliError::Usage("--field is required with --source file".into()))?;
            load_field(path, p.n)?.project_mass(p.c)?.norm_tuple(p.q)
        }
    };
    let report = fiber_project(&tuple, p)?;
    for r in &report.roots {
        println!("{:<6} s = {:+.9e}  level = {:.9e}  |grad|^2 = {:.6e}", format!("{:?}", r.class).to_lowercase(), r.s, r.psi, r.grad2);
    }
    let mut table = String::from("s,psi\n");
    for (s, v) in &report.landscape {
        table.push_str(&format!("{s:e},{v:e}\n"));
    }
    out.csv("landscape.csv", cfg, &table, false)?;
    out.json("fiber.json", cfg, json!({"tuple": tuple, "fiber": report}))
}

fn cmd_flow(cfg: &RunConfig, p: &ProblemParams, out: &mut OutDir) -> Result<(), CliError> {
    let mut flow = cfg.flow;
    if flow.region_cap.is_none() {
        flow.region_cap = minimizer_region(p).ok().map(|r| r.cap);
    }
    let cells = cfg.grid.cells.unwrap_or(FLOW_CELLS);
    let start = match flow.region_cap {
        Some(cap) => start_grad2(p, flow.objective, cap)?,
        None => p.n as f64 * p.c / (2.0 * cfg.grid.core.unwrap_or(1.0).powi(2)),
    };
    let result = match cfg.grid.r_max {
        Some(r_max) => {
            let width = (p.n as f64 * p.c / (2.0 * start)).sqrt();
            let grid = RadialGrid::new(GridSpec::new(p.n, cells, r_max, cfg.grid.core.unwrap_or(width)))?;
            gradient_flow(&gaussian_start(&grid, p.c, start)?, p, &flow)?
        }
        None => flow_adaptive(p, &flow, cells, start)?,
    };
    println!(
        "{:?} after {} iterations: energy = {:.9e}, lambda = {:.9e}, |grad u|^2 = {:.9e}, residual = {:.3e}",
        result.status, result.iters, result.energy, result.multiplier, result.tuple.grad2, result.el_residual
    );
    if result.status == FlowStatus::Converged && result.multiplier <= 0.0 {
        eprintln!(
            "warning: lambda <= 0; the limit is a Dirichlet mode of the ball of radius {:e}, not a solution on R^N",
            result.field.grid.r_max()
        );
    }
    out.csv("field.csv", cfg, &result.field.to_csv(), false)?;
    if flow.record_trajectory {
        out.csv("trajectory.csv", cfg, &result.trajectory_csv(), false)?;
    }
    out.json("flow.json", cfg, json!({"result": result}))?;
    if result.status != FlowStatus::Converged {
        return Err(CliError::Numerical(format!(
            "flow {:?}: {}",
            result.status,
            result.message.unwrap_or_default()
        )));
    }
    Ok(())
}

fn cmd_mp(
    cfg: &RunConfig,
    p: &ProblemParams,
    path: Option<PathChoice>,
    ns: &[u32],
    samples: usize,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let choice = path.unwrap_or(if p.n == 4 { PathChoice::W } else { PathChoice::Mu0 });
    let (report, extra) = match choice {
        PathChoice::Mu0 => (mp_path_mu0(p, samples)?, json!({})),
        PathChoice::W => {
            let i = local_minimizer(p, Objective::I)?;
            let j = local_minimizer(p, Objective::J)?;
            let path = best_w_path(p, &j, i.energy, ns)?;
            (path, json!({"m_c": i.energy, "m_bar_flow": j.energy}))
        }
    };
    let estimate = mp_level_estimate(p, std::slice::from_ref(&report))?;
    println!("sup level = {:.9e} at t = {:.6e}", report.sup_level, report.argmax_t);
    if let Some(cmp) = &report.comparison {
        println!(
            "threshold m_bar + Lambda = {:.9e}, margin = {:.6e}, quadrature error = {:.3e}",
            cmp.threshold,
            cmp.margin,
            report.quadrature_error.unwrap_or(f64::NAN)
        );
    }
    if let Some(d) = estimate.barrier {
        println!("barrier k0 f_c(k0) = {d:.9e}");
    }
    out.csv("levels.csv", cfg, &report.levels_csv(), false)?;
    out.json("mp.json", cfg, json!({"path": report, "estimate": estimate, "minimizers": extra}))
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn cmd_verify(cfg: &RunConfig, p: &ProblemParams, depth: Depth, out: &mut OutDir) -> Result<(), CliError> {
    if let Some(tag) = cfg.options.get("regime").and_then(|v| v.as_str()).and_then(RegimeTag::parse) {
        let class = classify(p);
        if class.tag != tag && !class.also.contains(&tag) {
            return Err(CliError::Usage(format!(
                "parameters fall in {} ({}), not {tag}",
                class.tag,
                class.violated.unwrap_or_default()
            )));
        }
    }
    let report = verify(p, depth)?;
    println!("regime {} ({} checks, depth {:?})", report.regime_tag, report.checks.len(), depth);
    let mut table = String::from("name,status,relation,lhs,rhs,claim,detail\n");
    for c in &report.checks {
        let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let rel = serde_json::to_value(c.relation).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        println!("  {:<9} {:<24} {} {rel} {}   {}", status, c.name, cell(c.lhs), cell(c.rhs), c.claim);
        table.push_str(&format!(
            "{},{status},{rel},{},{},{},{}\n",
            c.name,
            cell(c.lhs),
            cell(c.rhs),
            quote(&c.claim),
            c.detail.as_deref().map(quote).unwrap_or_default()
        ));
    }
    out.csv("checks.csv", cfg, &table, false)?;
    out.json("report.json", cfg, json!({"report": report}))?;
    if !report.passed {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        return Err(CliError::ChecksFailed(format!("failed checks: {}", names.join(", "))));
    }
    Ok(())
}

fn cmd_sweep(
    cfg: &RunConfig,
    base: &ProblemParams,
    axis: SweepAxis,
    values: &str,
    depth: Depth,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let resolver = Resolver { params: base };
    let values = values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| resolver.eval(&Value::parse(s)))
        .collect::<Result<Vec<f64>, _>>()?;
    let rows = sweep(axis, &values, base, depth);
    for r in &rows {
        let verdict = match (&r.passed, &r.error) {
            (_, Some(e)) => format!("error: {e}"),
            (Some(true), _) => "pass".into(),
            (Some(false), _) => "fail".into(),
            (None, _) => String::new(),
        };
        println!("{} = {:<14e} {:<14} {verdict}", axis.name(), r.value, r.regime_tag.as_str());
    }
    out.csv("sweep.csv", cfg, &sweep_csv(&rows), true)?;
    out.json("sweep.json", cfg, json!({"values": values, "rows": rows}))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
