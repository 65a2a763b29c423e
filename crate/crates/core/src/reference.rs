//! Analytic reference solutions of the continuous Dirichlet problem.

use std::f64::consts::PI;

use serde::Serialize;

use crate::specfun::{gamma, mittag_leffler_e0, mittag_leffler_e0_derivative, mittag_leffler_e0_terms};
use crate::{check_alpha, Error, KahanSum, Result};

const SCAN_STEP: f64 = 0.25;
const SCAN_LIMIT: f64 = -60.0;
const ROOT_TOL: f64 = 1e-11;

/// Below this `x` the eigenfunction is evaluated by its two leading terms.
const SMALL_X: f64 = 1e-8;

/// Panels used by [`continuous_inverse_apply`].
pub const INVERSE_PANELS: usize = 10_000;

/// Principal eigenpair `(c, u_c)` of the fractional derivative on `(0, 1)`
/// with absorbing boundaries. `c` is the largest negative root of
/// `E_{α,0}` and `u_c(x) = E_{α,0}(c x^α) / (c x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair {
    pub alpha: f64,
    pub c: f64,
    /// Series terms used to evaluate `E_{α,0}(c)` at the returned root.
    pub series_terms: usize,
}

impl EigenPair {
    /// Scans `c = -0.25, -0.5, …, -60` for the first sign change of
    /// `E_{α,0}(c)`, then bisects and Newton-polishes the bracketed root.
    pub fn principal(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let e = |c: f64| mittag_leffler_e0(alpha, c);
        // E_{α,0}(c) = c/Γ(α) + O(c²) < 0 just left of the origin
        let mut hi = -SCAN_STEP;
        let mut f_hi = e(hi)?;
        let bracket = loop {
            let lo = hi - SCAN_STEP;
            if lo < SCAN_LIMIT - 1e-12 {
                break None;
            }
            let f_lo = e(lo)?;
            if f_lo == 0.0 {
                break Some((lo, lo));
            }
            if f_lo.signum() != f_hi.signum() {
                break Some((lo, hi));
            }
            hi = lo;
            f_hi = f_lo;
        };
        let (mut lo, mut hi) = bracket.ok_or_else(|| {
            Error::RootNotFound(format!("E_(alpha,0) has no sign change on [{SCAN_LIMIT}, 0) for alpha = {alpha}"))
        })?;

        let f_hi_sign = e(hi)?.signum();
        while hi - lo > 1e-14 * lo.abs() {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = e(mid)?;
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_mid.signum() == f_hi_sign {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        let mut c = 0.5 * (lo + hi);
        let mut f_c = e(c)?;
        for _ in 0..3 {
            let slope = mittag_leffler_e0_derivative(alpha, c)?;
            if slope == 0.0 {
                break;
            }
            let next = c - f_c / slope;
            if !(next >= lo && next <= hi) {
                break;
            }
            let f_next = e(next)?;
            if f_next.abs() >= f_c.abs() {
                break;
            }
            c = next;
            f_c = f_next;
        }
        let (value, series_terms) = mittag_leffler_e0_terms(alpha, c)?;
        if value.abs() > ROOT_TOL {
            return Err(Error::Convergence(format!(
                "|E_(alpha,0)(c)| = {} at c = {c} exceeds {ROOT_TOL}",
                value.abs()
            )));
        }
        Ok(Self { alpha, c, series_terms })
    }

    pub fn u_c(&self, x: f64) -> Result<f64> {
        eigenfunction_u_c(self.alpha, self.c, x)
    }

    /// `e^(ct) u_c(x)`, the exact solution started from `u_c`.
    pub fn decay(&self, t: f64, x: f64) -> Result<f64> {
        Ok((self.c * t).exp() * self.u_c(x)?)
    }
}

/// Principal eigenvalue and the series length used at the root.
pub fn principal_eigenvalue(alpha: f64) -> Result<EigenPair> {
    EigenPair::principal(alpha)
}

/// `u_c(x) = Σ_{k≥1} c^(k-1) x^(kα-1) / Γ(kα)`, `x ∈ [0, 1]`.
pub fn eigenfunction_u_c(alpha: f64, c: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("eigenfunction argument {x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < SMALL_X || c == 0.0 {
        return Ok(x.powf(alpha - 1.0) / gamma(alpha)? + c * x.powf(2.0 * alpha - 1.0) / gamma(2.0 * alpha)?);
    }
    Ok(mittag_leffler_e0(alpha, c * x.powf(alpha))? / (c * x))
}

/// `e^(ct) u_c(x)`.
pub fn exact_decay_solution(pair: &EigenPair, t: f64, x: f64) -> Result<f64> {
    pair.decay(t, x)
}

/// Normal density `exp(-(x-μ)²/2σ²) / sqrt(2πσ²)`.
pub fn gaussian_ic(x: f64, mu: f64, sigma2: f64) -> f64 {
    (-(x - mu).powi(2) / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt()
}

/// `∫_0^x (x-y)^(α-1)/Γ(α) g(y) dy` by product integration: `g` is replaced
/// by its piecewise-linear interpolant on `panels` equal panels and each
/// panel is integrated exactly against the weakly singular kernel.
pub fn riemann_liouville_integral(alpha: f64, g: impl Fn(f64) -> f64, x: f64, panels: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("integration limit {x} must be >= 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let panels = panels.max(1);
    let width = x / panels as f64;
    let mut acc = KahanSum::default();
    let mut g_left = g(0.0);
    for k in 0..panels {
        let a = k as f64 * width;
        let b = if k + 1 == panels { x } else { (k + 1) as f64 * width };
        let g_right = g(b);
        let (s_a, s_b) = (x - a, x - b);
        let m0 = (s_a.powf(alpha) - s_b.powf(alpha)) / alpha;
        // ∫ (x-y)^(α-1) (y-a) dy over the panel
        let m1 = s_a * m0 - (s_a.powf(alpha + 1.0) - s_b.powf(alpha + 1.0)) / (alpha + 1.0);
        let hp = b - a;
        acc.add(g_left * (m0 - m1 / hp) + g_right * m1 / hp);
        g_left = g_right;
    }
    Ok(acc.value() / gamma(alpha)?)
}

/// The inverse of the Dirichlet generator applied to `g`,
///
/// `(A^α)^-1 g(x) = I^α g(x) - x^(α-1) I^α g(1)`,
///
/// with the boundary integral `I^α g(1)` computed once.
pub struct ContinuousInverse<F> {
    alpha: f64,
    g: F,
    panels: usize,
    boundary: f64,
}

impl<F: Fn(f64) -> f64> ContinuousInverse<F> {
    pub fn new(alpha: f64, g: F) -> Result<Self> {
        Self::with_panels(alpha, g, INVERSE_PANELS)
    }

    pub fn with_panels(alpha: f64, g: F, panels: usize) -> Result<Self> {
        let boundary = riemann_liouville_integral(alpha, &g, 1.0, panels)?;
        Ok(Self { alpha, g, panels, boundary })
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("argument {x} outside [0, 1]")));
        }
        let inner = riemann_liouville_integral(self.alpha, &self.g, x, self.panels)?;
        Ok(inner - x.powf(self.alpha - 1.0) * self.boundary)
    }
}

/// One-off evaluation of `(A^α)^-1 g(x)`.
pub fn continuous_inverse_apply(alpha: f64, g: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    ContinuousInverse::new(alpha, g)?.apply(x)
}
