//! Gamma function for positive real arguments.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for `x > 0`.
///
/// Lanczos approximation (g = 7, nine terms) on `[1.5, inf)`; smaller
/// arguments are shifted up with `gamma(x) = gamma(x + 1) / x`. Integer
/// arguments up to 23 are returned as exact factorials.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("gamma requires a finite x > 0, got {x}")));
    }
    if x.fract() == 0.0 && x <= 23.0 {
        let n = x as u32;
        return Ok((1..n).fold(1.0, |acc, k| acc * f64::from(k)));
    }
    let mut shift = 1.0;
    let mut y = x;
    while y < 1.5 {
        shift *= y;
        y += 1.0;
    }
    Ok(lanczos(y) / shift)
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // t^(z + 0.5) split in two halves keeps the power finite up to x ~ 170.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * std::f64::consts::PI).sqrt() * half * (half * (-t).exp()) * acc
}

/// Gamma for arguments known to be positive by construction.
pub(crate) fn gamma_pos(x: f64) -> f64 {
    gamma(x).expect("gamma argument positive by construction")
}
