//! Left and right Riemann-Liouville fractional integrals and derivatives on
//! uniform grids.
//!
//! Integrals use product integration: the integrand is replaced by its
//! piecewise-linear interpolant and the weakly singular kernel
//! `(t - tau)^(alpha - 1)` is integrated exactly on every subinterval. The
//! resulting weights depend only on index distances, so one application costs
//! `O(n^2)` multiply-adds. Derivatives differentiate the `(1 - alpha)`-order
//! integral numerically.
//!
//! The right-sided operators are independent direct quadratures over
//! `[t, b]`; they are never obtained by reflecting the left-sided ones.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{fd_derivative, FractionalOrder, Grid, GridFunction};
use crate::special::gamma_pos;

/// Distance above which the weight differences are summed as a binomial series.
const SERIES_THRESHOLD: usize = 10;

/// `C(p, j)` for real `p`, all `j` up to `len`.
fn binomials(p: f64, len: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(len + 1);
    c.push(1.0);
    for j in 1..=len {
        let prev = c[j - 1];
        c.push(prev * (p - (j as f64 - 1.0)) / j as f64);
    }
    c
}

/// Product-integration weights for one fractional order and grid size.
///
/// With `p = alpha + 1` the weight of a node at distance `k` from the
/// evaluation node is `(k+1)^p - 2 k^p + (k-1)^p`, the far (anchored)
/// endpoint at distance `m` gets `(m-1)^p - (m-1-alpha) m^alpha`, and the
/// evaluation node itself gets 1. Everything is scaled by
/// `h^alpha / Gamma(alpha + 2)`.
struct KernelWeights {
    scale: f64,
    inner: Vec<f64>,
    anchor: Vec<f64>,
}

impl KernelWeights {
    fn new(alpha: f64, grid: &Grid) -> Self {
        let n = grid.n();
        let p = alpha + 1.0;
        let c = binomials(p, 40);
        let second_difference = |k: usize| -> f64 {
            let kf = k as f64;
            if k < SERIES_THRESHOLD {
                (kf + 1.0).powf(p) - 2.0 * kf.powf(p) + (kf - 1.0).powf(p)
            } else {
                // k^p * 2 * sum_{j even >= 2} C(p, j) k^-j
                let inv2 = 1.0 / (kf * kf);
                let mut term_scale = inv2;
                let mut sum = 0.0;
                for j in (2..c.len()).step_by(2) {
                    let term = c[j] * term_scale;
                    sum += term;
                    if term.abs() <= 1e-18 * sum.abs() {
                        break;
                    }
                    term_scale *= inv2;
                }
                2.0 * kf.powf(p) * sum
            }
        };
        let anchor_weight = |m: usize| -> f64 {
            let mf = m as f64;
            if m < SERIES_THRESHOLD {
                (mf - 1.0).powf(p) - (mf - 1.0 - alpha) * mf.powf(alpha)
            } else {
                // m^p * sum_{j >= 2} C(p, j) (-1/m)^j; the j = 0, 1 terms cancel.
                let x = -1.0 / mf;
                let mut xp = x * x;
                let mut sum = 0.0;
                for cj in &c[2..] {
                    let term = cj * xp;
                    sum += term;
                    if term.abs() <= 1e-18 * sum.abs() {
                        break;
                    }
                    xp *= x;
                }
                mf.powf(p) * sum
            }
        };
        let mut inner = vec![0.0; n.max(1)];
        for (k, w) in inner.iter_mut().enumerate().skip(1) {
            *w = second_difference(k);
        }
        let mut anchor = vec![0.0; n + 1];
        for (m, w) in anchor.iter_mut().enumerate().skip(1) {
            *w = anchor_weight(m);
        }
        KernelWeights {
            scale: grid.h().powf(alpha) / gamma_pos(alpha + 2.0),
            inner,
            anchor,
        }
    }
}

/// Left fractional integral `I^alpha_{a+} u`.
///
/// `alpha = 0` returns `u` unchanged. For `alpha > 0` the value at `a` is 0.
pub fn left_frac_integral(u: &GridFunction, alpha: FractionalOrder) -> GridFunction {
    if alpha.value() == 0.0 {
        return u.clone();
    }
    let grid = *u.grid();
    let n = grid.n();
    let v = u.values();
    let w = KernelWeights::new(alpha.value(), &grid);
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        let mut acc = w.anchor[i] * v[0];
        for (j, &vj) in v.iter().enumerate().take(i).skip(1) {
            acc += w.inner[i - j] * vj;
        }
        acc += v[i];
        out[i] = w.scale * acc;
    }
    GridFunction::from_vec(grid, out)
}

/// Right fractional integral `I^alpha_{b-} u`, computed as a direct
/// quadrature over `[t, b]`.
pub fn right_frac_integral(u: &GridFunction, alpha: FractionalOrder) -> GridFunction {
    if alpha.value() == 0.0 {
        return u.clone();
    }
    let grid = *u.grid();
    let n = grid.n();
    let v = u.values();
    let w = KernelWeights::new(alpha.value(), &grid);
    let mut out = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let mut acc = w.anchor[n - i] * v[n];
        for j in ((i + 1)..n).rev() {
            acc += w.inner[j - i] * v[j];
        }
        acc += v[i];
        out[i] = w.scale * acc;
    }
    GridFunction::from_vec(grid, out)
}

/// Left Riemann-Liouville derivative `D^alpha_{a+} u = d/dt I^(1-alpha)_{a+} u`.
///
/// `alpha = 0` returns `u`; `alpha = 1` is [`fd_derivative`]. For
/// `0 < alpha < 1` the node `a` carries the one-sided flux
/// `(I[1] - I[0]) / h` instead of a second-order stencil: the exact value is
/// unbounded there whenever `u(a) != 0`, and with this choice the trapezoid
/// sum of the result telescopes to `I(b) - I(a)` up to the stencil at `b`.
pub fn left_rl_derivative(u: &GridFunction, alpha: FractionalOrder) -> GridFunction {
    match alpha.value() {
        0.0 => u.clone(),
        1.0 => fd_derivative(u),
        _ => {
            let integral = left_frac_integral(u, alpha.complement());
            let iv = integral.values();
            let h = u.grid().h();
            let mut d = fd_derivative(&integral).into_values();
            d[0] = (iv[1] - iv[0]) / h;
            GridFunction::from_vec(*u.grid(), d)
        }
    }
}

/// Right Riemann-Liouville derivative `D^alpha_{b-} u = -d/dt I^(1-alpha)_{b-} u`.
///
/// Mirror of [`left_rl_derivative`], built on [`right_frac_integral`]; the
/// anchored node is `b`.
pub fn right_rl_derivative(u: &GridFunction, alpha: FractionalOrder) -> GridFunction {
    match alpha.value() {
        0.0 => u.clone(),
        1.0 => -fd_derivative(u),
        _ => {
            let integral = right_frac_integral(u, alpha.complement());
            let iv = integral.values();
            let n = u.grid().n();
            let h = u.grid().h();
            let mut d: Vec<f64> = fd_derivative(&integral).values().iter().map(|v| -v).collect();
            d[n] = -(iv[n] - iv[n - 1]) / h;
            GridFunction::from_vec(*u.grid(), d)
        }
    }
}

/// The four fractional operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    LeftIntegral,
    RightIntegral,
    LeftDerivative,
    RightDerivative,
}

impl Operator {
    pub const ALL: [Operator; 4] = [
        Operator::LeftIntegral,
        Operator::RightIntegral,
        Operator::LeftDerivative,
        Operator::RightDerivative,
    ];

    pub fn apply(self, u: &GridFunction, alpha: FractionalOrder) -> GridFunction {
        match self {
            Operator::LeftIntegral => left_frac_integral(u, alpha),
            Operator::RightIntegral => right_frac_integral(u, alpha),
            Operator::LeftDerivative => left_rl_derivative(u, alpha),
            Operator::RightDerivative => right_rl_derivative(u, alpha),
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, Operator::LeftIntegral | Operator::RightIntegral)
    }

    pub fn side(self) -> Side {
        match self {
            Operator::LeftIntegral | Operator::LeftDerivative => Side::Left,
            Operator::RightIntegral | Operator::RightDerivative => Side::Right,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Operator::LeftIntegral => "left_int",
            Operator::RightIntegral => "right_int",
            Operator::LeftDerivative => "left_der",
            Operator::RightDerivative => "right_der",
        };
        f.write_str(s)
    }
}

/// Which endpoint a power function is anchored at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `(t - a)^beta`
    Left,
    /// `(b - t)^beta`
    Right,
}

/// `coeff * (t - a)^beta` or `coeff * (b - t)^beta`.
///
/// The fractional operators of the matching side map these to power
/// functions in closed form, which makes them the reference family for
/// operator accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFunction {
    pub beta: f64,
    pub side: Side,
    pub coeff: f64,
}

impl PowerFunction {
    pub fn new(beta: f64, side: Side, coeff: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::domain(format!(
                "power exponent must be finite and >= 0, got {beta}"
            )));
        }
        Ok(PowerFunction { beta, side, coeff })
    }

    pub fn eval(&self, grid: &Grid, t: f64) -> f64 {
        let s = match self.side {
            Side::Left => t - grid.a(),
            Side::Right => grid.b() - t,
        };
        self.coeff * s.max(0.0).powf(self.beta)
    }

    pub fn sample(&self, grid: &Grid) -> GridFunction {
        GridFunction::from_vec(*grid, grid.nodes().map(|t| self.eval(grid, t)).collect())
    }

    /// Closed-form image under `op` of order `alpha`; `op` must act from the
    /// anchored side. Integrals need `beta >= 0`, derivatives `beta >= 1`.
    pub fn image(&self, op: Operator, alpha: FractionalOrder) -> Result<PowerFunction> {
        if op.side() != self.side {
            return Err(Error::domain(format!(
                "{op} does not act on a power anchored at the {:?} end",
                self.side
            )));
        }
        let a = alpha.value();
        let beta = self.beta;
        if op.is_integral() {
            let factor = gamma_pos(beta + 1.0) / gamma_pos(beta + 1.0 + a);
            PowerFunction::new(beta + a, self.side, self.coeff * factor)
        } else {
            if beta < 1.0 {
                return Err(Error::domain(format!("derivative oracle needs beta >= 1, got {beta}")));
            }
            let factor = gamma_pos(beta + 1.0) / gamma_pos(beta + 1.0 - a);
            PowerFunction::new(beta - a, self.side, self.coeff * factor)
        }
    }
}

/// Exact samples of `op` applied to `(t - a)^beta` (left operators) or
/// `(b - t)^beta` (right operators):
/// `Gamma(beta + 1) / Gamma(beta + 1 +- alpha) * s^(beta +- alpha)`.
pub fn power_rule_oracle(beta: f64, alpha: FractionalOrder, op: Operator, grid: &Grid) -> Result<GridFunction> {
    if op.is_integral() && !(beta >= 0.0) {
        return Err(Error::domain(format!("integral oracle needs beta >= 0, got {beta}")));
    }
    if !op.is_integral() && !(beta >= 1.0) {
        return Err(Error::domain(format!("derivative oracle needs beta >= 1, got {beta}")));
    }
    let f = PowerFunction::new(beta, op.side(), 1.0)?;
    Ok(f.image(op, alpha)?.sample(grid))
}
