//! Fractional variational problems with left operators only: the action
//! `int_a^b L(t, x, x', D^a1_{a+} x, (D^a2_{a+} x)*) dt`, its first variation,
//! the Euler-Lagrange residual, a Ritz solver and the dissipative example.

mod dissipative;
mod ritz;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use dissipative::{
    dissipative_lagrangian, eom_residual, eom_residual_with_form, solve_linear_eom, solve_linear_eom_with_form,
    DissipativeParams, Potential,
};
pub use ritz::{ritz_solve, RitzConfig, RitzSolution, RitzStatus, Stationarity};

use crate::duality::{dual, pairing};
use crate::error::{Error, Result};
use crate::fractional::left_rl_derivative;
use crate::grid::{fd_derivative, trapezoid_integral, FractionalOrder, GridFunction};
use crate::identities::IdentityForm;

/// Arguments of the Lagrangian at one time: `u = D^a1_{a+} x`,
/// `v = (D^a2_{a+} x)*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
    pub u: f64,
    pub v: f64,
}

impl Point {
    fn with(self, slot: usize, value: f64) -> Point {
        let mut p = self;
        match slot {
            1 => p.t = value,
            2 => p.x = value,
            3 => p.xdot = value,
            4 => p.u = value,
            5 => p.v = value,
            _ => unreachable!("Lagrangian has five arguments"),
        }
        p
    }

    fn get(&self, slot: usize) -> f64 {
        match slot {
            1 => self.t,
            2 => self.x,
            3 => self.xdot,
            4 => self.u,
            5 => self.v,
            _ => unreachable!("Lagrangian has five arguments"),
        }
    }
}

/// A pure function of the Lagrangian arguments.
pub type Evaluator = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Wraps a closure as an [`Evaluator`].
pub fn evaluator(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Evaluator {
    Arc::new(f)
}

/// A Lagrangian with its partial derivatives in arguments 2 to 5.
#[derive(Clone)]
pub struct LagrangianSpec {
    pub l: Evaluator,
    pub d2: Evaluator,
    pub d3: Evaluator,
    pub d4: Evaluator,
    pub d5: Evaluator,
    pub alpha1: FractionalOrder,
    pub alpha2: FractionalOrder,
}

impl fmt::Debug for LagrangianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianSpec")
            .field("alpha1", &self.alpha1)
            .field("alpha2", &self.alpha2)
            .finish_non_exhaustive()
    }
}

impl LagrangianSpec {
    /// A Lagrangian without fractional arguments; `d4`, `d5` are zero.
    pub fn classical(l: Evaluator, d2: Evaluator, d3: Evaluator, alpha1: FractionalOrder) -> Self {
        let zero = evaluator(|_| 0.0);
        LagrangianSpec {
            l,
            d2,
            d3,
            d4: zero.clone(),
            d5: zero,
            alpha1,
            alpha2: alpha1.complement(),
        }
    }

    pub fn is_complementary(&self) -> bool {
        self.alpha1.is_complementary_to(self.alpha2)
    }

    /// Partial derivative in argument `slot` (2..=5).
    pub fn partial(&self, slot: usize) -> &Evaluator {
        match slot {
            2 => &self.d2,
            3 => &self.d3,
            4 => &self.d4,
            5 => &self.d5,
            _ => panic!("partial slot {slot} outside 2..=5"),
        }
    }

    /// Largest relative mismatch between each supplied partial and a central
    /// difference of `l`, over `samples` points drawn from `[-scale, scale]^5`.
    pub fn check_partials(&self, samples: usize, scale: f64, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let p = Point {
                t: rng.random_range(-scale..scale),
                x: rng.random_range(-scale..scale),
                xdot: rng.random_range(-scale..scale),
                u: rng.random_range(-scale..scale),
                v: rng.random_range(-scale..scale),
            };
            for slot in 2..=5 {
                worst = worst.max(partial_mismatch(&self.l, self.partial(slot), &p, slot));
            }
        }
        worst
    }
}

/// Relative mismatch of `d` against a Richardson-extrapolated central
/// difference of `l` in argument `slot`.
pub(crate) fn partial_mismatch(l: &Evaluator, d: &Evaluator, p: &Point, slot: usize) -> f64 {
    let x0 = p.get(slot);
    let h = 1e-3 * x0.abs().max(1.0);
    let cd = |h: f64| (l(&p.with(slot, x0 + h)) - l(&p.with(slot, x0 - h))) / (2.0 * h);
    let fd = (4.0 * cd(h / 2.0) - cd(h)) / 3.0;
    let exact = d(p);
    (fd - exact).abs() / exact.abs().max(fd.abs()).max(1.0)
}

/// Boundary values `x(a) = xa`, `x(b) = xb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub xa: f64,
    pub xb: f64,
}

impl BoundaryConditions {
    pub fn new(xa: f64, xb: f64) -> Result<Self> {
        if !xa.is_finite() || !xb.is_finite() {
            return Err(Error::domain(format!(
                "boundary values must be finite, got ({xa}, {xb})"
            )));
        }
        Ok(BoundaryConditions { xa, xb })
    }
}

/// `(D^a1_{a+} x, (D^a2_{a+} x)*)`.
pub fn fractional_arguments(
    x: &GridFunction,
    alpha1: FractionalOrder,
    alpha2: FractionalOrder,
) -> (GridFunction, GridFunction) {
    (left_rl_derivative(x, alpha1), dual(&left_rl_derivative(x, alpha2)))
}

/// Lagrangian arguments at every node of `x`.
pub(crate) fn points(x: &GridFunction, xdot: &GridFunction, u: &GridFunction, v: &GridFunction) -> Vec<Point> {
    let grid = x.grid();
    (0..=grid.n())
        .map(|i| Point {
            t: grid.node(i),
            x: x.values()[i],
            xdot: xdot.values()[i],
            u: u.values()[i],
            v: v.values()[i],
        })
        .collect()
}

fn trajectory_points(spec: &LagrangianSpec, x: &GridFunction) -> Vec<Point> {
    let (u, v) = fractional_arguments(x, spec.alpha1, spec.alpha2);
    points(x, &fd_derivative(x), &u, &v)
}

fn sampled(x: &GridFunction, pts: &[Point], f: &Evaluator) -> GridFunction {
    GridFunction::from_vec(*x.grid(), pts.iter().map(|p| f(p)).collect())
}

/// Trapezoid value of the action on the grid trajectory `x`.
pub fn action_value(spec: &LagrangianSpec, x: &GridFunction) -> Result<f64> {
    let pts = trajectory_points(spec, x);
    let density = sampled(x, &pts, &spec.l);
    if let Some(i) = density.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!(
            "action integrand is not finite at t = {}",
            x.grid().node(i)
        )));
    }
    Ok(trapezoid_integral(&density))
}

fn check_variation(x: &GridFunction, h: &GridFunction) -> Result<()> {
    x.same_grid(h)?;
    let vals = h.values();
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let (ha, hb) = (vals[0], vals[vals.len() - 1]);
    if ha.abs() > 1e-12 * scale || hb.abs() > 1e-12 * scale {
        return Err(Error::domain(format!(
            "variation must vanish at both ends, got h(a) = {ha}, h(b) = {hb}"
        )));
    }
    Ok(())
}

/// Directional derivative of the action at `x` along `h`:
/// `int [d2 L h + d3 L h' + d4 L D^a1 h + d5 L (D^a2 h)*] dt`.
pub fn first_variation(spec: &LagrangianSpec, x: &GridFunction, h: &GridFunction) -> Result<f64> {
    check_variation(x, h)?;
    let pts = trajectory_points(spec, x);
    let (hu, hv) = fractional_arguments(h, spec.alpha1, spec.alpha2);
    let terms = [
        (&spec.d2, h.clone()),
        (&spec.d3, fd_derivative(h)),
        (&spec.d4, hu),
        (&spec.d5, hv),
    ];
    let mut total = 0.0;
    for (d, dir) in terms {
        total += pairing(&sampled(x, &pts, d), &dir)?;
    }
    Ok(total)
}

/// The four terms of the Euler-Lagrange residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ElTerms {
    /// `d2 L`
    pub potential: GridFunction,
    /// `d/dt d3 L`, by finite differences of the sampled partial.
    pub inertial: GridFunction,
    /// `(D^a1_{a+} (d4 L)*)*`
    pub frac_u: GridFunction,
    /// `(D^a2_{a+} d5 L)*`
    pub frac_v: GridFunction,
}

impl ElTerms {
    /// `d2 L - d/dt d3 L + s (frac_u + frac_v)`, with `s = -1` for the stated
    /// form and `s = +1` for the corrected one. Only the corrected form is
    /// the variational derivative of the action.
    pub fn residual(&self, form: IdentityForm) -> GridFunction {
        let frac = &self.frac_u + &self.frac_v;
        let classical = &self.potential - &self.inertial;
        match form {
            IdentityForm::Stated => &classical - &frac,
            IdentityForm::Corrected => &classical + &frac,
        }
    }
}

pub fn el_residual_terms(spec: &LagrangianSpec, x: &GridFunction) -> ElTerms {
    let pts = trajectory_points(spec, x);
    let d4 = sampled(x, &pts, &spec.d4);
    let d5 = sampled(x, &pts, &spec.d5);
    ElTerms {
        potential: sampled(x, &pts, &spec.d2),
        inertial: fd_derivative(&sampled(x, &pts, &spec.d3)),
        frac_u: dual(&left_rl_derivative(&dual(&d4), spec.alpha1)),
        frac_v: dual(&left_rl_derivative(&d5, spec.alpha2)),
    }
}

/// Pointwise Euler-Lagrange residual
/// `d2 L - d/dt d3 L + (D^a1_{a+} (d4 L)*)* + (D^a2_{a+} d5 L)*`.
pub fn el_residual(spec: &LagrangianSpec, x: &GridFunction) -> GridFunction {
    el_residual_terms(spec, x).residual(IdentityForm::Corrected)
}

/// `|first_variation(x, h) - int el_residual(x) h dt|`.
pub fn consistency_variation_vs_residual(spec: &LagrangianSpec, x: &GridFunction, h: &GridFunction) -> Result<f64> {
    let variation = first_variation(spec, x, h)?;
    let projected = pairing(&el_residual(spec, x), h)?;
    Ok((variation - projected).abs())
}
