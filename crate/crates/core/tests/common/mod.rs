//! Brute-force reference values shared by the integration tests.
//!
//! Fractional integrals are evaluated pointwise after the substitution
//! `s = (t - tau)^alpha`, which removes the kernel singularity, followed by
//! composite Gauss-Legendre quadrature. Gamma values come from a fixed table
//! so nothing here depends on the library under test.
#![allow(dead_code)]

/// Gamma at the arguments the tests use, to 16 digits.
pub fn gamma_ref(x: f64) -> f64 {
    const TABLE: [(f64, f64); 8] = [
        (0.25, 3.625_609_908_221_908),
        (0.5, 1.772_453_850_905_516),
        (0.75, 1.225_416_702_465_178),
        (1.0, 1.0),
        (1.25, 0.906_402_477_055_477),
        (1.5, 0.886_226_925_452_758),
        (1.75, 0.919_062_526_848_883),
        (2.0, 1.0),
    ];
    TABLE
        .iter()
        .find(|(k, _)| (k - x).abs() < 1e-12)
        .map(|&(_, v)| v)
        .unwrap_or_else(|| panic!("no reference gamma for {x}"))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 16-point Gauss-Legendre over `[lo, hi]` with `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(16);
    let w = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * w;
        for &(x, wt) in &rule {
            total += wt * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * total
}

const PANELS: usize = 200;

/// `I^alpha_{a+} f (t)`.
pub fn left_integral(f: &dyn Fn(f64) -> f64, a: f64, t: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return f(t);
    }
    let top = (t - a).max(0.0).powf(alpha);
    integrate(|s| f(t - s.powf(1.0 / alpha)), 0.0, top, PANELS) / gamma_ref(alpha + 1.0)
}

/// `I^alpha_{b-} f (t)`.
pub fn right_integral(f: &dyn Fn(f64) -> f64, b: f64, t: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return f(t);
    }
    let top = (b - t).max(0.0).powf(alpha);
    integrate(|s| f(t + s.powf(1.0 / alpha)), 0.0, top, PANELS) / gamma_ref(alpha + 1.0)
}

/// `D^alpha_{a+} f (t) = f(a) (t - a)^-alpha / Gamma(1 - alpha) + I^(1-alpha)_{a+} f' (t)`.
pub fn left_derivative(f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64, a: f64, t: f64, alpha: f64) -> f64 {
    f(a) * (t - a).powf(-alpha) / gamma_ref(1.0 - alpha) + left_integral(df, a, t, 1.0 - alpha)
}

/// `D^alpha_{b-} f (t) = f(b) (b - t)^-alpha / Gamma(1 - alpha) - I^(1-alpha)_{b-} f' (t)`.
pub fn right_derivative(f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64, b: f64, t: f64, alpha: f64) -> f64 {
    f(b) * (b - t).powf(-alpha) / gamma_ref(1.0 - alpha) - right_integral(df, b, t, 1.0 - alpha)
}

/// Relative error `|x - want| / max(1, |want|)`.
pub fn rel(x: f64, want: f64) -> f64 {
    (x - want).abs() / want.abs().max(1.0)
}

#[test]
fn quadrature_self_check() {
    let gl = gauss_legendre(16);
    let sum: f64 = gl.iter().map(|(_, w)| w).sum();
    assert!((sum - 2.0).abs() < 1e-14);
    assert!((integrate(f64::exp, 0.0, 1.0, 4) - (1f64.exp() - 1.0)).abs() < 1e-14);
    // I^{1/2} 1 = 2 sqrt(t / pi)
    let v = left_integral(&|_| 1.0, 0.0, 0.7, 0.5);
    assert!((v - 2.0 * (0.7 / std::f64::consts::PI).sqrt()).abs() < 1e-13);
}
