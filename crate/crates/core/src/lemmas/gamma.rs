//! Log-gamma and the regularized incomplete gamma functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 1_000_000;
/// Below this argument the Lanczos form is used, above it Stirling's series.
const STIRLING_CUTOFF: f64 = 10.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Remainder `ln Γ(x) − [(x − ½)ln x − x + ½ln 2π]` for `x ≥ 10`.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / x
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= STIRLING_CUTOFF {
        return (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_correction(x);
    }
    if x < 0.5 {
        // Γ(x)Γ(1 − x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let series = LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64));
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `xᵃe⁻ˣ / Γ(a)`, computed without cancellation for large `a`.
fn prefactor(a: f64, x: f64) -> f64 {
    if a < STIRLING_CUTOFF {
        (a * x.ln() - x - ln_gamma(a)).exp()
    } else {
        let d = (x - a) / a;
        (a * (d.ln_1p() - d) - stirling_correction(a)).exp() * (a / (2.0 * PI)).sqrt()
    }
}

fn series_p(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            return Ok(sum * prefactor(a, x));
        }
    }
    Err(Error::Numerical(format!("gamma series did not converge at a={a}, x={x}")))
}

fn continued_fraction_q(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < EPS {
            return Ok(h * prefactor(a, x));
        }
    }
    Err(Error::Numerical(format!(
        "gamma continued fraction did not converge at a={a}, x={x}"
    )))
}

fn check_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) || !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!(
            "incomplete gamma needs a > 0 and x ≥ 0, got a={a}, x={x}"
        )));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> Result<f64> {
    check_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        series_p(a, x)
    } else {
        Ok(1.0 - continued_fraction_q(a, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x)/Γ(a)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    check_args(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - series_p(a, x)?)
    } else {
        continued_fraction_q(a, x)
    }
}

/// `γ_m = P(χ²_m ≥ m) = Q(m/2, m/2)`.
pub fn gamma_m(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("gamma_m needs m ≥ 1"));
    }
    let h = m as f64 / 2.0;
    regularized_gamma_q(h, h)
}

/// `ln C(n, r)` for real-valued counts `0 ≤ r ≤ n`.
pub fn ln_choose(n: f64, r: f64) -> f64 {
    if r <= 0.0 || r >= n {
        return 0.0;
    }
    ln_gamma(n + 1.0) - ln_gamma(r + 1.0) - ln_gamma(n - r + 1.0)
}
