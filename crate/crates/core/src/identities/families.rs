//! Test-function families used as identity operands.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IdentityId, Orders};
use crate::error::{Error, Result};
use crate::fractional::{Operator, PowerFunction, Side};
use crate::grid::{Grid, GridFunction};

/// Operand family for identity evaluation.
///
/// Two-operand identities take `(u, v)`; the second operand always vanishes
/// at both ends for the non-image families, so that integrands stay bounded
/// when a derivative is moved onto it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `u = ((t - a)/L)^beta`, `v = (4 (t - a)(b - t)/L^2)^beta`.
    Power(u32),
    /// `u = 16 s^2 (1 - s)^2`, `v = 27/4 s (1 - s)^2` with `s = (t - a)/L`.
    Bump,
    /// Fractional-integral images `I^alpha w` of cubic densities, taken from
    /// the side each identity's hypotheses require. Single-order identities only.
    Image,
    /// Seeded random cubic combinations of the above.
    Random(u64),
}

impl Family {
    pub fn key(&self) -> String {
        match self {
            Family::Power(beta) => format!("power{beta}"),
            Family::Bump => "bump".to_string(),
            Family::Image => "image".to_string(),
            Family::Random(seed) => format!("random:{seed}"),
        }
    }

    /// Parses a family key; `random` picks up `seed`.
    pub fn parse(key: &str, seed: u64) -> Result<Family> {
        match key {
            "power1" => Ok(Family::Power(1)),
            "power2" => Ok(Family::Power(2)),
            "power3" => Ok(Family::Power(3)),
            "bump" => Ok(Family::Bump),
            "image" => Ok(Family::Image),
            "random" => Ok(Family::Random(seed)),
            other => match other.strip_prefix("random:").map(u64::from_str) {
                Some(Ok(s)) => Ok(Family::Random(s)),
                _ => Err(Error::domain(format!(
                    "unknown family `{other}` (expected power1|power2|power3|bump|image|random)"
                ))),
            },
        }
    }

    /// Builds the operands of `id` on `grid`.
    pub fn operands(
        &self,
        id: IdentityId,
        orders: Orders,
        grid: &Grid,
    ) -> Result<(GridFunction, Option<GridFunction>)> {
        let two = id.operand_count() == 2;
        let (u, v) = match *self {
            Family::Power(beta) => {
                let beta = f64::from(beta);
                let l = grid.width();
                let u = sampled(grid, |t| ((t - grid.a()) / l).powf(beta));
                let v = sampled(grid, |t| {
                    (4.0 * (t - grid.a()) * (grid.b() - t) / (l * l)).max(0.0).powf(beta)
                });
                (u, v)
            }
            Family::Bump => {
                let l = grid.width();
                let u = sampled(grid, |t| {
                    let s = (t - grid.a()) / l;
                    16.0 * s * s * (1.0 - s) * (1.0 - s)
                });
                let v = sampled(grid, |t| {
                    let s = (t - grid.a()) / l;
                    6.75 * s * (1.0 - s) * (1.0 - s)
                });
                (u, v)
            }
            Family::Image => {
                let alpha = match orders {
                    Orders::Single(a) => a,
                    Orders::Pair(..) => {
                        return Err(Error::domain(format!(
                            "family `image` needs a single fractional order; {} takes a pair",
                            id.tag()
                        )))
                    }
                };
                let (su, sv) = image_sides(id);
                let u = image(grid, su, alpha.value(), &[1.0, 1.0, -1.0, 0.0])?;
                let v = image(grid, sv, alpha.value(), &[2.0, -1.0, 0.0, 1.0])?;
                (u, v)
            }
            Family::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ id.seed_salt());
                let mut coeffs = || -> [f64; 4] { std::array::from_fn(|_| rng.random_range(-1.0..1.0)) };
                let (cu, cv) = (coeffs(), coeffs());
                match orders {
                    Orders::Single(alpha) if id.requires_images() => {
                        let (su, sv) = image_sides(id);
                        (
                            image(grid, su, alpha.value(), &cu)?,
                            image(grid, sv, alpha.value(), &cv)?,
                        )
                    }
                    _ => {
                        let l = grid.width();
                        let u = sampled(grid, |t| {
                            let s = (t - grid.a()) / l;
                            s * (cu[1] + s * (cu[2] + s * cu[3]))
                        });
                        let v = sampled(grid, |t| {
                            let s = (t - grid.a()) / l;
                            let bump = 4.0 * s * (1.0 - s);
                            bump * (cv[0] + s * (cv[1] + s * (cv[2] + s * cv[3])))
                        });
                        (u, v)
                    }
                }
            }
        };
        Ok((u, two.then_some(v)))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

fn sampled(grid: &Grid, f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_vec(*grid, grid.nodes().map(f).collect())
}

/// Sides of the integral images for `(u, v)` matching each identity's
/// membership hypotheses.
fn image_sides(id: IdentityId) -> (Side, Side) {
    match id {
        // phi in the right image space, psi in the left one.
        IdentityId::IbpDerClassical => (Side::Right, Side::Left),
        // f and g* in matching spaces force g into the same space as f.
        IdentityId::IbpDerRightOnly => (Side::Right, Side::Right),
        _ => (Side::Left, Side::Left),
    }
}

/// Closed-form `I^alpha w` with `w = sum_k c_k s^k`, `s` the normalized
/// distance from the anchored end.
fn image(grid: &Grid, side: Side, alpha: f64, coeffs: &[f64]) -> Result<GridFunction> {
    let l = grid.width();
    let op = match side {
        Side::Left => Operator::LeftIntegral,
        Side::Right => Operator::RightIntegral,
    };
    let order = crate::grid::FractionalOrder::new(alpha)?;
    let mut terms = Vec::with_capacity(coeffs.len());
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            let p = PowerFunction::new(k as f64, side, c / l.powi(k as i32))?;
            terms.push(p.image(op, order)?);
        }
    }
    Ok(sampled(grid, |t| terms.iter().map(|p| p.eval(grid, t)).sum()))
}
