//! The dual (time-reflection) operator `f*(t) = f(b - t + a)` and the
//! trapezoid pairing it is symmetric under.

use crate::error::Result;
use crate::grid::{trapezoid_integral, GridFunction};

/// Exact index reversal: `dual(u)[i] = u[n - i]`.
pub fn dual(u: &GridFunction) -> GridFunction {
    let mut values = u.values().to_vec();
    values.reverse();
    GridFunction::from_vec(*u.grid(), values)
}

/// `int_a^b u v dt` by the trapezoid rule. Because the trapezoid weights are
/// symmetric, `pairing(dual(u), v) == pairing(u, dual(v))` up to summation order.
pub fn pairing(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    let product = u.zip_with(v, |x, y| x * y)?;
    Ok(trapezoid_integral(&product))
}
