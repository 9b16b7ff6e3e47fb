//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{FractionalOrder, Grid};
use crate::identities::{Family, IdentityForm, IdentityId, DEFAULT_ALPHAS, MIN_SWEEP_N};
use crate::variational::{BoundaryConditions, DissipativeParams, Potential, RitzConfig};

/// CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Identities,
    Convergence,
    Solve,
    DemoDamped,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Identities => "identities",
            Command::Convergence => "convergence",
            Command::Solve => "solve",
            Command::DemoDamped => "demo-damped",
        })
    }
}

const KEYS: &[&str] = &[
    "a",
    "b",
    "n",
    "n_list",
    "alphas",
    "alpha1",
    "family",
    "form",
    "m",
    "c",
    "k",
    "potential",
    "xa",
    "xb",
    "basis_size",
    "max_iters",
    "grad_tol",
    "step_shrink",
];

/// Parsed `key = value` pairs with their line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(Error::Config {
                    line,
                    message: format!("key `{key}` has no value"),
                });
            }
            if let Some((first, _)) = entries.insert(key.to_string(), (line, value.to_string())) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {first})"),
                });
            }
        }
        Ok(RawConfig { entries })
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |(l, _)| *l)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| Error::Config {
                line: *line,
                message: format!("cannot parse `{v}` for key `{key}`"),
            }),
        }
    }

    fn get_list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some((line, v)) => v
                .split(',')
                .map(|item| {
                    item.trim().parse().map_err(|_| Error::Config {
                        line: *line,
                        message: format!("cannot parse `{}` in list `{key}`", item.trim()),
                    })
                })
                .collect(),
        }
    }

    fn invalid(&self, key: &str, err: Error) -> Error {
        let message = match err {
            Error::Domain(m) => m,
            other => other.to_string(),
        };
        Error::Config {
            line: self.line(key),
            message: format!("`{key}`: {message}"),
        }
    }
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub a: f64,
    pub b: f64,
    /// Grid size for `solve` and `demo-damped`.
    pub n: usize,
    /// Grid sizes for `identities` and `convergence`.
    pub n_list: Vec<usize>,
    pub alphas: Vec<FractionalOrder>,
    pub alpha1: FractionalOrder,
    /// Overrides the default families when set.
    pub family: Option<Family>,
    pub form: IdentityForm,
    pub params: DissipativeParams,
    pub bc: BoundaryConditions,
    pub ritz: RitzConfig,
    pub filter: Option<IdentityId>,
    pub seed: u64,
    /// Resolved values of every key, for the run summary.
    pub echo: BTreeMap<String, String>,
}

impl RunConfig {
    /// Resolves `raw` against the defaults of `command`.
    pub fn resolve(command: Command, raw: &RawConfig, filter: Option<IdentityId>, seed: u64) -> Result<RunConfig> {
        let mechanics = matches!(command, Command::Solve | Command::DemoDamped);
        let (a0, b0) = if mechanics { (0.0, 5.0) } else { (0.0, 1.0) };
        let a = raw.get("a", a0)?;
        let b = raw.get("b", b0)?;
        let n = raw.get("n", 1024usize)?;
        let n_list = raw.get_list("n_list", &[256usize, 512, 1024, 2048])?;
        let alphas = raw.get_list("alphas", &DEFAULT_ALPHAS)?;
        let alpha1 = raw.get("alpha1", 0.5)?;
        let family_key: Option<String> = raw.entries.get("family").map(|(_, v)| v.clone());
        let form_key = raw.get("form", "stated".to_string())?;
        let m = raw.get("m", 1.0)?;
        let c = raw.get("c", 0.5)?;
        let k = raw.get("k", 1.0)?;
        let potential_key = raw.get("potential", "harmonic".to_string())?;
        let xa = raw.get("xa", 1.0)?;
        let xb = raw.get("xb", 0.0)?;
        let ritz = RitzConfig {
            basis_size: raw.get("basis_size", 64usize)?,
            max_iters: raw.get("max_iters", 50usize)?,
            grad_tol: raw.get("grad_tol", 1e-9)?,
            step_shrink: raw.get("step_shrink", 0.5)?,
        };

        let range_key = if raw.entries.contains_key("b") { "b" } else { "a" };
        Grid::new(a, b, 2).map_err(|e| raw.invalid(range_key, e))?;
        let grid = Grid::new(a, b, n).map_err(|e| raw.invalid("n", e))?;
        if !mechanics {
            if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(raw.invalid("n_list", Error::domain("grid sizes must be strictly ascending")));
            }
            if let Some(&bad) = n_list.iter().find(|&&n| n < MIN_SWEEP_N) {
                return Err(raw.invalid(
                    "n_list",
                    Error::domain(format!("grid size {bad} is below {MIN_SWEEP_N}")),
                ));
            }
        }
        let alphas = alphas
            .iter()
            .map(|&v| FractionalOrder::new(v))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| raw.invalid("alphas", e))?;
        if alphas.is_empty() {
            return Err(raw.invalid("alphas", Error::domain("at least one order is required")));
        }
        let alpha1 = FractionalOrder::new(alpha1).map_err(|e| raw.invalid("alpha1", e))?;
        if mechanics && !(alpha1.value() > 0.0 && alpha1.value() < 1.0) {
            return Err(raw.invalid("alpha1", Error::domain(format!("need 0 < alpha1 < 1, got {alpha1}"))));
        }
        let family = family_key
            .as_deref()
            .map(|key| Family::parse(key, seed))
            .transpose()
            .map_err(|e| raw.invalid("family", e))?;
        let form = IdentityForm::from_str(&form_key).map_err(|e| raw.invalid("form", e))?;
        let potential = match potential_key.as_str() {
            "harmonic" => Potential::Harmonic { k },
            "pendulum" => Potential::Pendulum { k },
            other => {
                return Err(raw.invalid(
                    "potential",
                    Error::domain(format!("unknown potential `{other}` (expected harmonic|pendulum)")),
                ))
            }
        };
        if command == Command::DemoDamped && potential.stiffness().is_none() {
            return Err(raw.invalid("potential", Error::domain("demo-damped needs the harmonic potential")));
        }
        if !k.is_finite() {
            return Err(raw.invalid("k", Error::domain(format!("stiffness must be finite, got {k}"))));
        }
        let params = DissipativeParams::new(m, c, potential).map_err(|e| {
            let key = if m > 0.0 && m.is_finite() { "c" } else { "m" };
            raw.invalid(key, e)
        })?;
        let bc =
            BoundaryConditions::new(xa, xb).map_err(|e| raw.invalid(if xa.is_finite() { "xb" } else { "xa" }, e))?;
        if mechanics {
            ritz.validate(&grid).map_err(|e| {
                let key = match e.to_string() {
                    s if s.contains("grad_tol") => "grad_tol",
                    s if s.contains("step_shrink") => "step_shrink",
                    s if s.contains("max_iters") && ritz.max_iters == 0 => "max_iters",
                    _ => "basis_size",
                };
                raw.invalid(key, e)
            })?;
        }

        let join = |v: Vec<String>| v.join(", ");
        let mut echo = BTreeMap::new();
        echo.insert("a".into(), a.to_string());
        echo.insert("b".into(), b.to_string());
        if mechanics {
            echo.insert("n".into(), n.to_string());
            echo.insert("alpha1".into(), alpha1.to_string());
            echo.insert("m".into(), m.to_string());
            echo.insert("c".into(), c.to_string());
            echo.insert("k".into(), k.to_string());
            echo.insert("potential".into(), potential_key);
            echo.insert("xa".into(), xa.to_string());
            echo.insert("xb".into(), xb.to_string());
            echo.insert("basis_size".into(), ritz.basis_size.to_string());
            echo.insert("max_iters".into(), ritz.max_iters.to_string());
            echo.insert("grad_tol".into(), format!("{:e}", ritz.grad_tol));
            echo.insert("step_shrink".into(), ritz.step_shrink.to_string());
        } else {
            echo.insert("n_list".into(), join(n_list.iter().map(usize::to_string).collect()));
            echo.insert("alphas".into(), join(alphas.iter().map(|a| a.to_string()).collect()));
            echo.insert("family".into(), family.map_or("default".into(), |f| f.key()));
            echo.insert("form".into(), form.to_string());
            echo.insert("filter".into(), filter.map_or("all".into(), |id| id.tag().to_string()));
        }
        echo.insert("seed".into(), seed.to_string());

        Ok(RunConfig {
            command,
            a,
            b,
            n,
            n_list,
            alphas,
            alpha1,
            family,
            form,
            params,
            bc,
            ritz,
            filter,
            seed,
            echo,
        })
    }
}
