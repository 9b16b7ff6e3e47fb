//! Uniform grids on `[a, b]`, sampled functions, norms, quadrature and
//! finite differences.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Uniform grid with `n` subintervals on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::domain(format!(
                "grid requires finite a < b, got a = {a}, b = {b}"
            )));
        }
        if n < 2 {
            return Err(Error::domain(format!("grid requires n >= 2 subintervals, got n = {n}")));
        }
        let grid = Grid {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        };
        debug_assert!((0..=n).all(|i| {
            let mirrored = grid.b - grid.node(i) + grid.a;
            (grid.node(n - i) - mirrored).abs() <= 8.0 * f64::EPSILON * (b - a).abs().max(a.abs()).max(b.abs())
        }));
        Ok(grid)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Node `i`; `node(0) == a` and `node(n) == b` exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + (self.b - self.a) * (i as f64 / self.n as f64)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    /// Trapezoid weights `h/2, h, ..., h, h/2`; symmetric under index reversal.
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Index window `[lo, hi]` of nodes in `[a + delta, b - delta]`.
    pub fn interior_range(&self, delta: f64) -> Result<(usize, usize)> {
        if !(0.0..0.5 * self.width()).contains(&delta) {
            return Err(Error::domain(format!(
                "interior margin {delta} outside [0, (b - a)/2) = [0, {})",
                0.5 * self.width()
            )));
        }
        let lo = (delta / self.h - 1e-9).ceil().max(0.0) as usize;
        Ok((lo, self.n - lo))
    }

    fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "[{}, {}] n={} vs [{}, {}] n={}",
                self.a, self.b, self.n, other.a, other.b, other.n
            )))
        }
    }
}

/// Shorthand for [`Grid::new`].
pub fn make_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::new(a, b, n)
}

/// Real values at the nodes of a [`Grid`]. All values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "grid function needs {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite value {} at node {i} (t = {})",
                values[i],
                grid.node(i)
            )));
        }
        Ok(GridFunction { grid, values })
    }

    /// Constructor for operator outputs whose finiteness follows from finite inputs.
    pub(crate) fn from_vec(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        GridFunction {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_vec(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| f(x, y)).collect();
        Ok(GridFunction::from_vec(self.grid, values))
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        self.grid.ensure_same(&other.grid)
    }
}

macro_rules! pointwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&GridFunction> for &GridFunction {
            type Output = GridFunction;

            /// Panics if the operands live on different grids.
            fn $method(self, rhs: &GridFunction) -> GridFunction {
                self.zip_with(rhs, |x, y| x $op y).expect("pointwise operation on mismatched grids")
            }
        }

        impl $trait<GridFunction> for GridFunction {
            type Output = GridFunction;

            fn $method(self, rhs: GridFunction) -> GridFunction {
                (&self).$method(&rhs)
            }
        }
    };
}

pointwise_op!(Add, add, +);
pointwise_op!(Sub, sub, -);
pointwise_op!(Mul, mul, *);

impl Neg for &GridFunction {
    type Output = GridFunction;

    fn neg(self) -> GridFunction {
        self.map(|v| -v)
    }
}

impl Neg for GridFunction {
    type Output = GridFunction;

    fn neg(self) -> GridFunction {
        -&self
    }
}

impl Mul<&GridFunction> for f64 {
    type Output = GridFunction;

    fn mul(self, rhs: &GridFunction) -> GridFunction {
        rhs.scale(self)
    }
}

/// Samples `expr` at every node; any non-finite sample is a domain error.
pub fn sample(expr: impl Fn(f64) -> f64, grid: &Grid) -> Result<GridFunction> {
    GridFunction::new(*grid, grid.nodes().map(expr).collect())
}

/// Order of a fractional operator, `0 <= alpha <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && (0.0..=1.0).contains(&alpha) {
            Ok(FractionalOrder(alpha))
        } else {
            Err(Error::domain(format!(
                "fractional order must lie in [0, 1], got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The complementary order `1 - alpha`.
    pub fn complement(self) -> FractionalOrder {
        FractionalOrder(1.0 - self.0)
    }

    /// True when `self + other == 1` to round-off.
    pub fn is_complementary_to(self, other: FractionalOrder) -> bool {
        (self.0 + other.0 - 1.0).abs() <= 1e-12
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which norm to take of a grid function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Sup,
    /// Trapezoid-weighted discrete L2 norm.
    L2,
    /// Sup over the nodes in `[a + delta, b - delta]`.
    InteriorSup(f64),
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Sup => write!(f, "sup"),
            NormKind::L2 => write!(f, "l2"),
            NormKind::InteriorSup(d) => write!(f, "interior_sup({d})"),
        }
    }
}

pub fn norm(u: &GridFunction, kind: NormKind) -> Result<f64> {
    let sup = |vals: &[f64]| vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    match kind {
        NormKind::Sup => Ok(sup(&u.values)),
        NormKind::L2 => Ok(trapezoid_integral(&u.map(|v| v * v)).sqrt()),
        NormKind::InteriorSup(delta) => {
            let (lo, hi) = u.grid.interior_range(delta)?;
            Ok(sup(&u.values[lo..=hi]))
        }
    }
}

/// Composite trapezoid rule over `[a, b]`.
pub fn trapezoid_integral(u: &GridFunction) -> f64 {
    let v = &u.values;
    let n = v.len() - 1;
    let inner: f64 = v[1..n].iter().sum();
    u.grid.h * (inner + 0.5 * (v[0] + v[n]))
}

/// First derivative: central differences inside, second-order one-sided
/// stencils at both ends. Exact on quadratics.
pub fn fd_derivative(u: &GridFunction) -> GridFunction {
    let v = &u.values;
    let n = v.len() - 1;
    let h = u.grid.h;
    let mut d = vec![0.0; n + 1];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for i in 1..n {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    GridFunction::from_vec(u.grid, d)
}
