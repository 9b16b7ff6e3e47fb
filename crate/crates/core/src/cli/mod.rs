//! Command-line front end: identity suites, convergence sweeps and the
//! dissipative solver, with CSV and JSON reports.

mod config;
mod report;

use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

pub use config::{Command, RawConfig, RunConfig};
pub use report::{identity_csv, trajectory_csv, TrajectoryRows};

use crate::error::Error;
use crate::grid::{make_grid, norm, NormKind};
use crate::identities::{assess, criterion, refinement_sweep, Domain, Family, IdentityId, IdentityReport, Orders};
use crate::variational::{
    dissipative_lagrangian, el_residual, eom_residual, ritz_solve, solve_linear_eom, DissipativeParams, RitzStatus,
};

/// `fracvar <command> --config <path> [--out <dir>] [--filter <id>] [--seed <u64>]`
#[derive(Debug, Parser)]
#[command(
    name = "fracvar",
    version,
    about = "Fractional duality identities and fractional variational problems"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for report files.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Restrict `identities`/`convergence` to one identity tag.
    #[arg(long)]
    pub filter: Option<String>,
    /// Seed for randomized families.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Config(Error),
    /// Exit code 3.
    Numerical { operation: String, source: Error },
    /// Exit code 1.
    Io(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }

    fn numerical(operation: impl Into<String>) -> impl FnOnce(Error) -> CliError {
        let operation = operation.into();
        move |source| CliError::Numerical { operation, source }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid configuration: {e}"),
            CliError::Numerical { operation, source } => write!(f, "{operation} failed: {source}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

/// Report file contents, produced before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub files: Vec<(&'static str, String)>,
}

/// Parses arguments and config, runs, writes reports; returns the exit code.
pub fn main_with_args(args: Args) -> i32 {
    match execute(&args) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            0
        }
        Err(e) => {
            eprintln!("fracvar: {e}");
            e.exit_code()
        }
    }
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(Error::Io(format!("{}: {e}", args.config.display()))))?;
    let raw = RawConfig::parse(&text).map_err(CliError::Config)?;
    let filter = args
        .filter
        .as_deref()
        .map(str::parse::<IdentityId>)
        .transpose()
        .map_err(CliError::Config)?;
    let cfg = RunConfig::resolve(args.command, &raw, filter, args.seed).map_err(CliError::Config)?;
    let outputs = run(&cfg)?;
    write_outputs(&outputs, &args.out).map_err(CliError::Io)
}

/// Runs `cfg` and renders every report file in memory.
pub fn run(cfg: &RunConfig) -> Result<Outputs, CliError> {
    match cfg.command {
        Command::Identities | Command::Convergence => run_identities(cfg),
        Command::Solve | Command::DemoDamped => run_mechanics(cfg),
    }
}

/// Writes all files into a temporary directory inside `out`, then renames
/// them into place.
pub fn write_outputs(outputs: &Outputs, out: &Path) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(out)?;
    let staging = tempfile::Builder::new().prefix(".fracvar-").tempdir_in(out)?;
    for (name, body) in &outputs.files {
        std::fs::write(staging.path().join(name), body)?;
    }
    let mut written = Vec::with_capacity(outputs.files.len());
    for (name, _) in &outputs.files {
        let target = out.join(name);
        std::fs::rename(staging.path().join(name), &target)?;
        written.push(target);
    }
    Ok(written)
}

struct Case {
    id: IdentityId,
    family: Family,
    orders: Orders,
}

fn run_identities(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let ids: Vec<IdentityId> = IdentityId::ALL
        .into_iter()
        .filter(|id| cfg.filter.is_none_or(|f| f == *id))
        .collect();
    let mut cases = Vec::new();
    for &id in &ids {
        for &alpha in &cfg.alphas {
            let orders = Orders::for_identity(id, alpha);
            let families: Vec<Family> = match (cfg.family, cfg.command) {
                (Some(f), _) => vec![f],
                (None, Command::Identities) => vec![id.default_families()[0]],
                (None, _) => id.default_families().to_vec(),
            };
            cases.extend(families.into_iter().map(|family| Case { id, family, orders }));
        }
    }
    let domain = Domain { a: cfg.a, b: cfg.b };
    let sweeps = cases
        .par_iter()
        .map(|c| {
            refinement_sweep(c.id, c.family, c.orders, domain, &cfg.n_list, cfg.form).map_err(CliError::numerical(
                format!(
                    "refinement_sweep({}, {}, alpha = {})",
                    c.id,
                    c.family,
                    c.orders.alpha1()
                ),
            ))
        })
        .collect::<Result<Vec<Vec<IdentityReport>>, CliError>>()?;

    let rows: Vec<&IdentityReport> = sweeps.iter().flatten().collect();
    let mut groups: Map<String, Value> = Map::new();
    let mut worst: Map<String, Value> = Map::new();
    for sweep in &sweeps {
        let id = sweep[0].id;
        let a = assess(sweep);
        let entry = groups
            .entry(criterion(id))
            .or_insert_with(|| json!({"evaluated": 0, "passed": 0, "failed": []}));
        if a.evaluated {
            entry["evaluated"] = json!(entry["evaluated"].as_u64().unwrap_or(0) + 1);
            if a.pass() {
                entry["passed"] = json!(entry["passed"].as_u64().unwrap_or(0) + 1);
            } else {
                let tag = format!("{}:{}:alpha={}", id, sweep[0].family, sweep[0].alpha1);
                entry["failed"].as_array_mut().expect("array").push(json!(tag));
            }
        }
        let max = sweep.iter().map(|r| r.residual).fold(0.0, f64::max);
        let slot = worst.entry(id.tag()).or_insert(json!(0.0));
        if max > slot.as_f64().unwrap_or(0.0) {
            *slot = json!(max);
        }
    }
    for value in groups.values_mut() {
        let pass = value["evaluated"].as_u64() > Some(0) && value["failed"].as_array().is_some_and(|f| f.is_empty());
        value["pass"] = json!(pass);
    }
    let summary = json!({
        "command": cfg.command.to_string(),
        "config": cfg.echo,
        "rows": rows.len(),
        "criteria": groups,
        "max_residual": worst,
    });
    Ok(Outputs {
        files: vec![("report.csv", identity_csv(&rows)), ("summary.json", pretty(&summary))],
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Harmonic boundary-value solution of `m x'' + k x = 0`, if unique.
fn frictionless_exact(p: &DissipativeParams, cfg: &RunConfig) -> Option<impl Fn(f64) -> f64> {
    let k = p.potential.stiffness()?;
    let (a, len, xa, xb) = (cfg.a, cfg.b - cfg.a, cfg.bc.xa, cfg.bc.xb);
    let w = (k / p.mass).sqrt();
    if !(k > 0.0) || (w * len).sin().abs() < 1e-8 {
        return None;
    }
    let coeff = (xb - xa * (w * len).cos()) / (w * len).sin();
    Some(move |t: f64| xa * (w * (t - a)).cos() + coeff * (w * (t - a)).sin())
}

fn run_mechanics(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let grid = make_grid(cfg.a, cfg.b, cfg.n).map_err(CliError::Config)?;
    let delta = NormKind::InteriorSup(0.05 * grid.width());
    let spec =
        dissipative_lagrangian(&cfg.params, cfg.alpha1).map_err(CliError::numerical("dissipative_lagrangian"))?;
    let sol = ritz_solve(&spec, cfg.bc, &grid, &cfg.ritz).map_err(CliError::numerical("ritz_solve"))?;
    if sol.status != RitzStatus::Converged {
        return Err(CliError::Numerical {
            operation: "ritz_solve".into(),
            source: Error::Domain(format!(
                "{} after {} iterations (gradient sup {:.3e} > grad_tol {:.3e})",
                sol.status, sol.iterations, sol.grad_sup, cfg.ritz.grad_tol
            )),
        });
    }
    let linear = match cfg.params.potential.stiffness() {
        Some(_) => Some(solve_linear_eom(&cfg.params, cfg.bc, &grid).map_err(CliError::numerical("solve_linear_eom"))?),
        None => None,
    };
    let el = el_residual(&spec, &sol.x);
    let eom = eom_residual(&sol.x, &cfg.params);
    let interior = |u: &crate::grid::GridFunction| norm(u, delta).map_err(CliError::numerical("interior norm"));
    let el_plus_eom = interior(&(&el + &eom))?;

    let mut results = Map::new();
    results.insert("ritz_status".into(), json!(sol.status.to_string()));
    results.insert("ritz_iterations".into(), json!(sol.iterations));
    results.insert("ritz_grad_sup".into(), json!(sol.grad_sup));
    results.insert("action".into(), json!(sol.action));
    results.insert("stationarity".into(), json!(sol.stationarity.to_string()));
    results.insert("hessian_min_eig".into(), json!(sol.hessian_min_eig));
    results.insert("hessian_max_eig".into(), json!(sol.hessian_max_eig));
    results.insert("el_residual_interior_sup".into(), json!(interior(&el)?));
    results.insert("eom_residual_interior_sup".into(), json!(interior(&eom)?));
    results.insert("el_plus_eom_interior_sup".into(), json!(el_plus_eom));
    let mut criteria = Map::new();
    criteria.insert(
        "el_eom_reduction".into(),
        json!({"value": el_plus_eom, "threshold": 1e-2, "pass": el_plus_eom <= 1e-2}),
    );
    if let Some(lin) = &linear {
        let diff = norm(&(&sol.x - lin), NormKind::Sup).map_err(CliError::numerical("sup norm"))?;
        results.insert("ritz_vs_linear_sup".into(), json!(diff));
        criteria.insert(
            "solver_agreement".into(),
            json!({"value": diff, "threshold": 1e-3, "pass": diff <= 1e-3}),
        );
    }
    if cfg.command == Command::DemoDamped {
        let frictionless = DissipativeParams::new(cfg.params.mass, 0.0, cfg.params.potential.clone())
            .map_err(CliError::numerical("frictionless parameters"))?;
        if let Some(exact) = frictionless_exact(&frictionless, cfg) {
            let spec0 = dissipative_lagrangian(&frictionless, cfg.alpha1)
                .map_err(CliError::numerical("dissipative_lagrangian"))?;
            let sol0 =
                ritz_solve(&spec0, cfg.bc, &grid, &cfg.ritz).map_err(CliError::numerical("ritz_solve (c = 0)"))?;
            let exact = crate::grid::sample(exact, &grid).map_err(CliError::numerical("analytic solution"))?;
            let err = norm(&(&sol0.x - &exact), NormKind::Sup).map_err(CliError::numerical("sup norm"))?;
            results.insert("frictionless_vs_analytic_sup".into(), json!(err));
            criteria.insert(
                "frictionless_analytic".into(),
                json!({"value": err, "threshold": 1e-3, "pass": err <= 1e-3}),
            );
        }
    }
    let summary = json!({
        "command": cfg.command.to_string(),
        "config": cfg.echo,
        "results": results,
        "criteria": criteria,
    });
    let rows = TrajectoryRows {
        x_ritz: &sol.x,
        x_linear: linear.as_ref(),
        el: &el,
        eom: &eom,
    };
    Ok(Outputs {
        files: vec![
            ("trajectory.csv", trajectory_csv(&rows)),
            ("summary.json", pretty(&summary)),
        ],
    })
}
