//! Direct (Ritz) method over the sine basis.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{points, BoundaryConditions, LagrangianSpec, Point};
use crate::duality::dual;
use crate::error::{Error, Result};
use crate::fractional::left_rl_derivative;
use crate::grid::{fd_derivative, Grid, GridFunction};

/// Ritz solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RitzConfig {
    /// Number of sine modes `m`.
    pub basis_size: usize,
    pub max_iters: usize,
    /// Stop once every gradient component is at most this in magnitude.
    pub grad_tol: f64,
    /// Backtracking factor in `(0, 1)`.
    pub step_shrink: f64,
}

impl Default for RitzConfig {
    fn default() -> Self {
        RitzConfig {
            basis_size: 32,
            max_iters: 50,
            grad_tol: 1e-9,
            step_shrink: 0.5,
        }
    }
}

impl RitzConfig {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if self.basis_size == 0 || self.max_iters == 0 {
            return Err(Error::domain("basis_size and max_iters must be positive"));
        }
        if 2 * self.basis_size > grid.n() {
            return Err(Error::domain(format!(
                "basis_size {} is not resolved by n = {} (need n >= 2 m)",
                self.basis_size,
                grid.n()
            )));
        }
        if !(self.grad_tol > 0.0) || !self.grad_tol.is_finite() {
            return Err(Error::domain(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::domain(format!(
                "step_shrink must lie in (0, 1), got {}",
                self.step_shrink
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RitzStatus {
    Converged,
    MaxItersReached,
    /// No step along the search direction reduced the gradient norm.
    LineSearchFailed,
}

impl fmt::Display for RitzStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RitzStatus::Converged => "converged",
            RitzStatus::MaxItersReached => "max_iters reached",
            RitzStatus::LineSearchFailed => "line search failed",
        })
    }
}

/// Type of the stationary point, from the spectrum of the reduced Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stationarity {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

impl fmt::Display for Stationarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stationarity::Minimum => "minimum",
            Stationarity::Maximum => "maximum",
            Stationarity::Saddle => "saddle",
            Stationarity::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzSolution {
    pub x: GridFunction,
    pub coeffs: Vec<f64>,
    pub status: RitzStatus,
    pub iterations: usize,
    /// Largest gradient component at `x`.
    pub grad_sup: f64,
    pub action: f64,
    pub stationarity: Stationarity,
    pub hessian_min_eig: f64,
    pub hessian_max_eig: f64,
}

/// A grid function together with the quantities the Lagrangian reads.
struct Lifted {
    x: GridFunction,
    xdot: GridFunction,
    u: GridFunction,
    v: GridFunction,
}

impl Lifted {
    fn new(x: GridFunction, spec: &LagrangianSpec) -> Self {
        let xdot = fd_derivative(&x);
        let u = left_rl_derivative(&x, spec.alpha1);
        let v = dual(&left_rl_derivative(&x, spec.alpha2));
        Lifted { x, xdot, u, v }
    }
}

struct Problem<'a> {
    spec: &'a LagrangianSpec,
    grid: Grid,
    line: Lifted,
    basis: Vec<Lifted>,
    weights: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(spec: &'a LagrangianSpec, bc: BoundaryConditions, grid: Grid, m: usize) -> Self {
        let n = grid.n();
        let mut line: Vec<f64> = (0..=n)
            .map(|i| bc.xa + (bc.xb - bc.xa) * (i as f64 / n as f64))
            .collect();
        line[n] = bc.xb;
        let basis = (1..=m)
            .map(|k| {
                let mut phi: Vec<f64> = (0..=n)
                    .map(|i| (k as f64 * std::f64::consts::PI * i as f64 / n as f64).sin())
                    .collect();
                phi[0] = 0.0;
                phi[n] = 0.0;
                Lifted::new(GridFunction::from_vec(grid, phi), spec)
            })
            .collect();
        let weights = (0..=n).map(|i| grid.trapezoid_weight(i)).collect();
        Problem {
            spec,
            grid,
            line: Lifted::new(GridFunction::from_vec(grid, line), spec),
            basis,
            weights,
        }
    }

    fn combine(&self, c: &[f64], pick: impl Fn(&Lifted) -> &GridFunction) -> GridFunction {
        let mut out = pick(&self.line).values().to_vec();
        for (ck, phi) in c.iter().zip(&self.basis) {
            for (o, p) in out.iter_mut().zip(pick(phi).values()) {
                *o += ck * p;
            }
        }
        GridFunction::from_vec(self.grid, out)
    }

    fn trajectory(&self, c: &[f64]) -> GridFunction {
        self.combine(c, |l| &l.x)
    }

    fn points(&self, c: &[f64]) -> Vec<Point> {
        let x = self.trajectory(c);
        points(
            &x,
            &self.combine(c, |l| &l.xdot),
            &self.combine(c, |l| &l.u),
            &self.combine(c, |l| &l.v),
        )
    }

    fn action(&self, c: &[f64]) -> Result<f64> {
        let pts = self.points(c);
        let mut total = 0.0;
        for (p, w) in pts.iter().zip(&self.weights) {
            let l = (self.spec.l)(p);
            if !l.is_finite() {
                return Err(Error::domain(format!("action integrand is not finite at t = {}", p.t)));
            }
            total += w * l;
        }
        Ok(total)
    }

    /// Gradient of the discrete action: the first variation along each mode.
    fn gradient(&self, c: &[f64]) -> Result<DVector<f64>> {
        let pts = self.points(c);
        let s = self.spec;
        let partials: Vec<[f64; 4]> = pts
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| [w * (s.d2)(p), w * (s.d3)(p), w * (s.d4)(p), w * (s.d5)(p)])
            .collect();
        let g = DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|phi| {
                let (h, hd, hu, hv) = (phi.x.values(), phi.xdot.values(), phi.u.values(), phi.v.values());
                partials
                    .iter()
                    .enumerate()
                    .map(|(i, d)| d[0] * h[i] + d[1] * hd[i] + d[2] * hu[i] + d[3] * hv[i])
                    .sum::<f64>()
            }),
        );
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("first variation is not finite"));
        }
        Ok(g)
    }

    /// Central-difference Jacobian of the gradient, symmetrized.
    fn hessian(&self, c: &[f64]) -> Result<DMatrix<f64>> {
        let m = c.len();
        let mut h = DMatrix::zeros(m, m);
        let mut probe = c.to_vec();
        for j in 0..m {
            let eps = 1e-6 * c[j].abs().max(1.0);
            probe[j] = c[j] + eps;
            let gp = self.gradient(&probe)?;
            probe[j] = c[j] - eps;
            let gm = self.gradient(&probe)?;
            probe[j] = c[j];
            h.set_column(j, &((gp - gm) / (2.0 * eps)));
        }
        Ok((&h + h.transpose()) * 0.5)
    }
}

fn sup(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Finds a stationary point of the action over `line(bc) + span{sin(k pi (t - a)/(b - a))}`.
///
/// Newton iteration on the gradient with a finite-difference Hessian and
/// backtracking on `|g|^2`, starting from all coefficients zero. Stationary
/// points of fractional actions need not be minima, so the solver targets
/// `g = 0` directly and classifies the result afterwards.
pub fn ritz_solve(
    spec: &LagrangianSpec,
    bc: BoundaryConditions,
    grid: &Grid,
    cfg: &RitzConfig,
) -> Result<RitzSolution> {
    cfg.validate(grid)?;
    let problem = Problem::new(spec, bc, *grid, cfg.basis_size);
    let mut c = vec![0.0; cfg.basis_size];
    let mut g = problem.gradient(&c)?;
    let mut status = RitzStatus::MaxItersReached;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        if sup(&g) <= cfg.grad_tol {
            status = RitzStatus::Converged;
            break;
        }
        iterations += 1;
        let hess = problem.hessian(&c)?;
        let direction = hess
            .lu()
            .solve(&(-&g))
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .unwrap_or_else(|| -&g);
        let merit = g.norm_squared();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = c.iter().zip(direction.iter()).map(|(ci, di)| ci + step * di).collect();
            problem.action(&trial)?;
            let gt = problem.gradient(&trial)?;
            if gt.norm_squared() <= (1.0 - 1e-4 * step) * merit {
                accepted = Some((trial, gt));
                break;
            }
            step *= cfg.step_shrink;
        }
        match accepted {
            Some((trial, gt)) => {
                c = trial;
                g = gt;
            }
            None => {
                status = RitzStatus::LineSearchFailed;
                break;
            }
        }
    }
    if status == RitzStatus::MaxItersReached && sup(&g) <= cfg.grad_tol {
        status = RitzStatus::Converged;
    }

    let eig = SymmetricEigen::new(problem.hessian(&c)?).eigenvalues;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-8 * lo.abs().max(hi.abs());
    let stationarity = if lo > tol {
        Stationarity::Minimum
    } else if hi < -tol {
        Stationarity::Maximum
    } else if lo < -tol && hi > tol {
        Stationarity::Saddle
    } else {
        Stationarity::Degenerate
    };
    Ok(RitzSolution {
        x: problem.trajectory(&c),
        action: problem.action(&c)?,
        coeffs: c,
        status,
        iterations,
        grad_sup: sup(&g),
        stationarity,
        hessian_min_eig: lo,
        hessian_max_eig: hi,
    })
}
