//! The dissipative Lagrangian `1/2 m x'^2 - U(x) + 1/2 c D^a1 x (D^a2 x)*`
//! and its equation of motion `m x'' - c (x')* + U'(x) = 0`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{evaluator, BoundaryConditions, LagrangianSpec};
use crate::duality::dual;
use crate::error::{Error, Result};
use crate::grid::{fd_derivative, FractionalOrder, Grid, GridFunction};
use crate::identities::IdentityForm;

/// Potential energy `U` and its derivative.
#[derive(Clone)]
pub enum Potential {
    /// `U = k x^2 / 2`
    Harmonic { k: f64 },
    /// `U = k (1 - cos x)`
    Pendulum { k: f64 },
    Custom {
        u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        du: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl Potential {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Harmonic { k } => 0.5 * k * x * x,
            Potential::Pendulum { k } => k * (1.0 - x.cos()),
            Potential::Custom { u, .. } => u(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Potential::Harmonic { k } => k * x,
            Potential::Pendulum { k } => k * x.sin(),
            Potential::Custom { du, .. } => du(x),
        }
    }

    /// `k` when `U'` is linear.
    pub fn stiffness(&self) -> Option<f64> {
        match self {
            Potential::Harmonic { k } => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Harmonic { k } => write!(f, "Harmonic {{ k: {k} }}"),
            Potential::Pendulum { k } => write!(f, "Pendulum {{ k: {k} }}"),
            Potential::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// Mass, friction coefficient and potential of the dissipative example.
#[derive(Debug, Clone)]
pub struct DissipativeParams {
    pub mass: f64,
    pub c: f64,
    pub potential: Potential,
}

impl DissipativeParams {
    pub fn new(mass: f64, c: f64, potential: Potential) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::domain(format!("mass must be positive and finite, got {mass}")));
        }
        if !c.is_finite() {
            return Err(Error::domain(format!("friction coefficient must be finite, got {c}")));
        }
        Ok(DissipativeParams { mass, c, potential })
    }

    pub fn harmonic(mass: f64, c: f64, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::domain(format!("stiffness must be finite, got {k}")));
        }
        Self::new(mass, c, Potential::Harmonic { k })
    }
}

/// Builds the dissipative Lagrangian for orders `(alpha1, 1 - alpha1)`.
pub fn dissipative_lagrangian(p: &DissipativeParams, alpha1: FractionalOrder) -> Result<LagrangianSpec> {
    let a = alpha1.value();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!(
            "dissipative Lagrangian needs 0 < alpha1 < 1, got {a}"
        )));
    }
    let (m, c) = (p.mass, p.c);
    let (pot_l, pot_d) = (p.potential.clone(), p.potential.clone());
    Ok(LagrangianSpec {
        l: evaluator(move |q| 0.5 * m * q.xdot * q.xdot - pot_l.value(q.x) + 0.5 * c * q.u * q.v),
        d2: evaluator(move |q| -pot_d.derivative(q.x)),
        d3: evaluator(move |q| m * q.xdot),
        d4: evaluator(move |q| 0.5 * c * q.v),
        d5: evaluator(move |q| 0.5 * c * q.u),
        alpha1,
        alpha2: alpha1.complement(),
    })
}

fn friction_sign(form: IdentityForm) -> f64 {
    match form {
        IdentityForm::Stated => 1.0,
        IdentityForm::Corrected => -1.0,
    }
}

/// `U'(x) - c (x')* + m x''`, the negative of the Euler-Lagrange residual
/// of the dissipative Lagrangian.
pub fn eom_residual(x: &GridFunction, p: &DissipativeParams) -> GridFunction {
    eom_residual_with_form(x, p, IdentityForm::Corrected)
}

/// As [`eom_residual`]; the stated form carries `+c (x')*`.
pub fn eom_residual_with_form(x: &GridFunction, p: &DissipativeParams, form: IdentityForm) -> GridFunction {
    let xdot = fd_derivative(x);
    let xddot = fd_derivative(&xdot);
    let friction = dual(&xdot).scale(friction_sign(form) * p.c);
    let force = x.map(|v| p.potential.derivative(v));
    &(&force + &friction) + &xddot.scale(p.mass)
}

/// Solves the linear equation of motion for `U = k x^2 / 2` by collocation:
/// `k x_i - c (D1 x)_{n-i} + m (D2 x)_i = 0` at interior nodes, with central
/// first and second differences and the end rows pinned to `bc`.
pub fn solve_linear_eom(p: &DissipativeParams, bc: BoundaryConditions, grid: &Grid) -> Result<GridFunction> {
    solve_linear_eom_with_form(p, bc, grid, IdentityForm::Corrected)
}

pub fn solve_linear_eom_with_form(
    p: &DissipativeParams,
    bc: BoundaryConditions,
    grid: &Grid,
    form: IdentityForm,
) -> Result<GridFunction> {
    let k = p
        .potential
        .stiffness()
        .ok_or_else(|| Error::domain("solve_linear_eom needs a harmonic potential"))?;
    if !(p.mass > 0.0) {
        return Err(Error::domain(format!("solve_linear_eom needs m > 0, got {}", p.mass)));
    }
    let n = grid.n();
    let h = grid.h();
    let friction = friction_sign(form) * p.c / (2.0 * h);
    let inertia = p.mass / (h * h);
    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut rhs = DVector::<f64>::zeros(n + 1);
    a[(0, 0)] = 1.0;
    rhs[0] = bc.xa;
    a[(n, n)] = 1.0;
    rhs[n] = bc.xb;
    for i in 1..n {
        a[(i, i)] += k - 2.0 * inertia;
        a[(i, i - 1)] += inertia;
        a[(i, i + 1)] += inertia;
        let j = n - i;
        a[(i, j + 1)] += friction;
        a[(i, j - 1)] -= friction;
    }
    let lu = a.lu();
    let pivots = lu.u().diagonal();
    let max = pivots.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = pivots.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition < 1e14) {
        return Err(Error::Singular {
            context: "solve_linear_eom".to_string(),
            condition,
        });
    }
    let x = lu.solve(&rhs).ok_or_else(|| Error::Singular {
        context: "solve_linear_eom".to_string(),
        condition,
    })?;
    let mut values: Vec<f64> = x.iter().copied().collect();
    values[0] = bc.xa;
    values[n] = bc.xb;
    GridFunction::new(*grid, values)
}
