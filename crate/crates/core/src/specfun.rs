//! Scalar special functions: gamma, generalized binomial coefficients, the
//! Mittag-Leffler function `E_{α,0}` and the real polylogarithm.

use std::f64::consts::PI;

use crate::{check_alpha, Error, KahanSum, Result};

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

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument for which `gamma` is evaluated directly inside the
/// Mittag-Leffler series; beyond it the term is formed from `ln_gamma`.
const GAMMA_DIRECT_MAX: f64 = 170.0;

/// Relative truncation threshold shared by the series evaluations.
const SERIES_RTOL: f64 = 1e-16;

/// `|z|` bound for [`mittag_leffler_e0`]; only the power series is implemented.
pub const MITTAG_LEFFLER_MAX_ABS_Z: f64 = 100.0;
const MITTAG_LEFFLER_MAX_TERMS: usize = 300;

const POLYLOG_MAX_TERMS: usize = 1_000_000;

/// Lanczos sum `A_g(x)` for the shifted argument `x = z - 1`.
fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `sin(πx)` with exact argument reduction, so that integer arguments give
/// an exact zero and large `|x|` does not lose accuracy.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// The gamma function, Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    if x < 0.5 {
        return Ok(PI / (sin_pi(x) * gamma(1.0 - x)?));
    }
    if x == x.floor() && x <= GAMMA_DIRECT_MAX {
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so that t^(z + 1/2) does not overflow before e^-t
    // brings it back into range.
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(z))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / sin_pi(x)).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Generalized binomial coefficient `binom(α, j) = α(α-1)…(α-j+1)/j!`.
pub fn gen_binomial(alpha: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (alpha - i as f64) / (i as f64 + 1.0))
}

/// `z^p / Γ(arg)`, switching to logarithms once `Γ(arg)` would overflow.
fn power_over_gamma(z: f64, p: usize, arg: f64) -> Result<f64> {
    if arg <= GAMMA_DIRECT_MAX {
        Ok(z.powi(p as i32) / gamma(arg)?)
    } else {
        let magnitude = (p as f64 * z.abs().ln() - ln_gamma(arg)?).exp();
        let negative = z < 0.0 && p % 2 == 1;
        Ok(if negative { -magnitude } else { magnitude })
    }
}

/// `E_{α,0}(z) = Σ_{k≥1} z^k / Γ(kα)` together with the number of terms
/// summed.
pub fn mittag_leffler_e0_terms(alpha: f64, z: f64) -> Result<(f64, usize)> {
    check_alpha(alpha)?;
    if !z.is_finite() || z.abs() > MITTAG_LEFFLER_MAX_ABS_Z {
        return Err(Error::Domain(format!(
            "Mittag-Leffler series is only supported for |z| <= {MITTAG_LEFFLER_MAX_ABS_Z}, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok((0.0, 0));
    }
    let mut sum = KahanSum::default();
    let mut terms = 0;
    for k in 1..=MITTAG_LEFFLER_MAX_TERMS {
        let term = power_over_gamma(z, k, k as f64 * alpha)?;
        sum.add(term);
        terms = k;
        if term.abs() < SERIES_RTOL * sum.value().abs() {
            break;
        }
    }
    Ok((sum.value(), terms))
}

/// The Mittag-Leffler function `E_{α,0}(z)` for real `|z| ≤ 100`.
pub fn mittag_leffler_e0(alpha: f64, z: f64) -> Result<f64> {
    mittag_leffler_e0_terms(alpha, z).map(|(v, _)| v)
}

/// `d/dz E_{α,0}(z) = Σ_{k≥1} k z^(k-1) / Γ(kα)`; used for Newton polishing.
pub(crate) fn mittag_leffler_e0_derivative(alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !z.is_finite() || z.abs() > MITTAG_LEFFLER_MAX_ABS_Z {
        return Err(Error::Domain(format!("derivative of E_(alpha,0) at {z}")));
    }
    let mut sum = KahanSum::default();
    sum.add(1.0 / gamma(alpha)?);
    if z == 0.0 {
        return Ok(sum.value());
    }
    for k in 2..=MITTAG_LEFFLER_MAX_TERMS {
        let term = k as f64 * power_over_gamma(z, k - 1, k as f64 * alpha)?;
        sum.add(term);
        if term.abs() < SERIES_RTOL * sum.value().abs() {
            break;
        }
    }
    Ok(sum.value())
}

/// The polylogarithm `Li_s(t) = Σ_{j≥1} j^(-s) t^j` for real `|t| < 1`.
pub fn polylog(s: f64, t: f64) -> Result<f64> {
    if !s.is_finite() || !t.is_finite() || t.abs() >= 1.0 {
        return Err(Error::Domain(format!("polylog requires |t| < 1, got s = {s}, t = {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    // For s < 0 the magnitudes j^(-s)|t|^j grow until j ≈ -s / ln(1/|t|).
    let peak = if s < 0.0 { -s / (-t.abs().ln()) } else { 0.0 };
    let mut sum = KahanSum::default();
    let mut power = 1.0;
    for j in 1..=POLYLOG_MAX_TERMS {
        power *= t;
        let term = (j as f64).powf(-s) * power;
        sum.add(term);
        if j as f64 > peak && term.abs() < SERIES_RTOL * sum.value().abs() {
            return Ok(sum.value());
        }
        if power == 0.0 {
            return Ok(sum.value());
        }
    }
    Err(Error::Convergence(format!("polylog(s = {s}, t = {t}) did not converge within {POLYLOG_MAX_TERMS} terms")))
}
