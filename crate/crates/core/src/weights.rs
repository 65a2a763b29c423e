//! Scheme weights.
//!
//! Both schemes approximate the fractional derivative by
//! `h^-α Σ_{k≥0} w_k f(x - (k-1)h)`. The new scheme picks the weights so
//! that the approximation is exact on `x^(α-1)`, which amounts to the
//! lower-triangular Toeplitz system
//!
//! ```text
//! Σ_{m=0}^{k} w_m (k-m+1)^(α-1) = Γ(α) δ_{k0},   k = 0, 1, …, N.
//! ```
//!
//! The shifted Grünwald weights are `(-1)^k binom(α, k)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::specfun::{gamma, polylog};
use crate::{check_alpha, Error, KahanSum, Result};

/// Spatial discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Order-α scheme, exact on `x^(α-1)`.
    New,
    /// Shifted Grünwald-Letnikov scheme.
    Grunwald,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::New, Scheme::Grunwald];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::New => "new",
            Scheme::Grunwald => "grunwald",
        }
    }

    /// Weights `w_0..=w_n` of this scheme.
    pub fn weights(self, alpha: f64, n: usize) -> Result<WeightSequence> {
        match self {
            Scheme::New => new_weights(alpha, n),
            Scheme::Grunwald => grunwald_weights(alpha, n),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Scheme::New),
            "grunwald" => Ok(Scheme::Grunwald),
            other => Err(Error::Domain(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Immutable weight vector `w_0..=w_N` for one scheme and order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    alpha: f64,
    scheme: Scheme,
    w: Vec<f64>,
}

impl WeightSequence {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Highest stored index `N`.
    pub fn max_index(&self) -> usize {
        self.w.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.w[k]
    }

    /// Partial sums `S_k = Σ_{j≤k} w_j` for `k = 0..=N`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = KahanSum::default();
        self.w
            .iter()
            .map(|&w| {
                acc.add(w);
                acc.value()
            })
            .collect()
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need N >= 2 weights, got N = {n}")));
    }
    Ok(())
}

/// Second differences of `(j+1)^β`, i.e. the coefficients of
/// `(1-t)^2 Σ_{j≥0} (j+1)^β t^j`.
///
/// `q_0 = 1`, `q_1 = 2^β - 2` and `q_j = j^β [(1+1/j)^β - 2 + (1-1/j)^β]`,
/// evaluated with `expm1`/`ln_1p` because the bracket is `O(j^-2)`.
fn power_second_differences(beta: f64, n: usize) -> Vec<f64> {
    let mut q = Vec::with_capacity(n + 1);
    q.push(1.0);
    if n >= 1 {
        q.push(2f64.powf(beta) - 2.0);
    }
    for j in 2..=n {
        if beta == 1.0 {
            q.push(0.0);
            continue;
        }
        let inv = 1.0 / j as f64;
        let up = (beta * inv.ln_1p()).exp_m1();
        let down = (beta * (-inv).ln_1p()).exp_m1();
        q.push((j as f64).powf(beta) * (up + down));
    }
    q
}

/// Weights of the order-α scheme, `w_0..=w_n`.
///
/// The defining Toeplitz system is multiplied through by `(1-t)^2` (in
/// generating-function terms) before forward substitution: the kernel
/// becomes the second differences of `(j+1)^(α-1)`, which decay like
/// `j^(α-3)`, so the long dot products no longer cancel catastrophically.
/// Both systems have the same unique solution.
pub fn new_weights(alpha: f64, n: usize) -> Result<WeightSequence> {
    check_alpha(alpha)?;
    check_len(n)?;
    let g = gamma(alpha)?;
    let q = power_second_differences(alpha - 1.0, n);
    let rhs = |k: usize| match k {
        0 => g,
        1 => -2.0 * g,
        2 => g,
        _ => 0.0,
    };
    let mut w: Vec<f64> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = KahanSum::default();
        acc.add(rhs(k));
        // descending m pairs the small tail of q with the large leading w
        for m in (0..k).rev() {
            acc.add(-w[m] * q[k - m]);
        }
        w.push(acc.value());
    }
    Ok(WeightSequence { alpha, scheme: Scheme::New, w })
}

/// Shifted Grünwald weights `w_k = (-1)^k binom(α, k)`, `k = 0..=n`.
pub fn grunwald_weights(alpha: f64, n: usize) -> Result<WeightSequence> {
    check_alpha(alpha)?;
    check_len(n)?;
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for k in 1..=n {
        let prev = w[k - 1];
        w.push(prev * (k as f64 - 1.0 - alpha) / k as f64);
    }
    Ok(WeightSequence { alpha, scheme: Scheme::Grunwald, w })
}

/// Max-norm residual of the defining system `Σ_m w_m (k-m+1)^(α-1) = Γ(α)δ_{k0}`,
/// relative to `Γ(α)`.
pub fn defining_system_residual(w: &WeightSequence) -> Result<f64> {
    let g = gamma(w.alpha)?;
    let beta = w.alpha - 1.0;
    let powers: Vec<f64> = (0..w.w.len()).map(|j| (j as f64 + 1.0).powf(beta)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..w.w.len() {
        let mut acc = KahanSum::default();
        for m in 0..=k {
            acc.add(w.w[m] * powers[k - m]);
        }
        let target = if k == 0 { g } else { 0.0 };
        worst = worst.max((acc.value() - target).abs());
    }
    Ok(worst / g)
}

/// `|Σ_k w_k t^k - tΓ(α)/Li_{1-α}(t)|` for the new scheme.
pub fn generating_residual(w: &WeightSequence, t: f64) -> Result<f64> {
    if w.scheme != Scheme::New {
        return Err(Error::Domain("the polylogarithm generating function describes the new scheme only".into()));
    }
    if !(t > 0.0 && t <= 0.9) {
        return Err(Error::Domain(format!("t = {t} is outside (0, 0.9]")));
    }
    let mut acc = KahanSum::default();
    let mut power = 1.0;
    for &wk in &w.w {
        acc.add(wk * power);
        power *= t;
    }
    let closed = t * gamma(w.alpha)? / polylog(1.0 - w.alpha, t)?;
    Ok((acc.value() - closed).abs())
}

/// Sign structure of a weight sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QMatrixReport {
    pub w1_negative: bool,
    /// `w_k > 0` for every stored `k ≠ 1`.
    pub others_positive: bool,
    pub partial_sum_at_n: f64,
    /// `S_k ≥ S_{k-1}` for all `k ≥ 2`.
    pub partial_sums_increasing: bool,
}

pub fn qmatrix_report(w: &WeightSequence) -> QMatrixReport {
    let sums = w.partial_sums();
    QMatrixReport {
        w1_negative: w.w[1] < 0.0,
        others_positive: w.w.iter().enumerate().all(|(k, &v)| k == 1 || v > 0.0),
        partial_sum_at_n: *sums.last().expect("at least three weights"),
        partial_sums_increasing: sums[1..].windows(2).all(|p| p[1] >= p[0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Literal forward substitution on the undifferenced system.
    fn naive_new_weights(alpha: f64, n: usize) -> Vec<f64> {
        let mut w = vec![gamma(alpha).unwrap()];
        for k in 1..=n {
            let s: f64 = (0..k).map(|m| w[m] * ((k - m + 1) as f64).powf(alpha - 1.0)).sum();
            w.push(-s);
        }
        w
    }

    #[test]
    fn classical_weights_at_alpha_two() {
        let w = new_weights(2.0, 4).unwrap();
        assert_eq!(w.as_slice(), &[1.0, -2.0, 1.0, 0.0, 0.0]);
        let g = grunwald_weights(2.0, 4).unwrap();
        assert_eq!(g.as_slice(), &[1.0, -2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn leading_weights() {
        for alpha in [1.1, 1.5, 1.9] {
            let w = new_weights(alpha, 8).unwrap();
            assert_eq!(w.get(0), gamma(alpha).unwrap());
        }
        let w = new_weights(1.5, 8).unwrap();
        assert_relative_eq!(w.get(1), -1.253_314_137_315_500_3, max_relative = 1e-15);
        // higher-precision forward substitution
        let expected = [0.237_463_788_985_783_29, 0.062_525_401_813_089_426, 0.025_241_007_109_905_197];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(w.get(k + 2), *e, max_relative = 1e-13);
        }
    }

    #[test]
    fn agrees_with_literal_forward_substitution() {
        for alpha in [1.2, 1.5, 1.8] {
            let w = new_weights(alpha, 64).unwrap();
            let naive = naive_new_weights(alpha, 64);
            for (k, (a, b)) in w.as_slice().iter().zip(&naive).enumerate() {
                assert!((a - b).abs() <= 1e-12, "alpha={alpha} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn grunwald_examples() {
        let g = grunwald_weights(1.5, 4).unwrap();
        assert_eq!(g.get(1), -1.5);
        assert_relative_eq!(g.get(2), 0.375, max_relative = 1e-15);
        for k in 0..=4 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(g.get(k), sign * crate::specfun::gen_binomial(1.5, k), max_relative = 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(new_weights(1.0, 8), Err(Error::Domain(_))));
        assert!(matches!(new_weights(2.1, 8), Err(Error::Domain(_))));
        assert!(matches!(grunwald_weights(0.5, 8), Err(Error::Domain(_))));
        assert!(matches!(new_weights(1.5, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn resubstitution_residual() {
        for alpha in [1.1, 1.4, 1.9] {
            let w = new_weights(alpha, 2048).unwrap();
            assert!(defining_system_residual(&w).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn new_scheme_matches_grunwald_at_two() {
        let w = new_weights(2.0, 64).unwrap();
        let g = grunwald_weights(2.0, 64).unwrap();
        for (a, b) in w.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn generating_function_examples() {
        let w = new_weights(2.0, 64).unwrap();
        assert!(generating_residual(&w, 0.5).unwrap() <= 1e-15);
        let w = new_weights(1.5, 2048).unwrap();
        assert!(generating_residual(&w, 0.5).unwrap() <= 1e-8);
        assert!(generating_residual(&w, 0.01).unwrap() <= 1e-8);
        assert!(matches!(generating_residual(&w, 0.95), Err(Error::Domain(_))));
        assert!(matches!(generating_residual(&w, 0.0), Err(Error::Domain(_))));
        let g = grunwald_weights(1.5, 64).unwrap();
        assert!(generating_residual(&g, 0.5).is_err());
    }

    #[test]
    fn generating_function_grid() {
        for alpha in [1.2, 1.5, 1.8] {
            let w = new_weights(alpha, 2048).unwrap();
            for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
                assert!(generating_residual(&w, t).unwrap() <= 1e-8, "alpha={alpha} t={t}");
            }
        }
    }

    #[test]
    fn sign_structure_reports() {
        let w = new_weights(1.4, 4096).unwrap();
        let r = qmatrix_report(&w);
        assert!(r.w1_negative && r.others_positive && r.partial_sums_increasing);
        assert!(r.partial_sum_at_n < 0.0);
        assert!(r.partial_sum_at_n.abs() < w.partial_sums()[256].abs());

        let g = grunwald_weights(1.5, 4096).unwrap();
        let r = qmatrix_report(&g);
        assert!(r.w1_negative && r.others_positive && r.partial_sums_increasing);

        let w = new_weights(2.0, 8).unwrap();
        assert_eq!(qmatrix_report(&w).partial_sum_at_n, 0.0);
    }

    #[test]
    fn sign_structure_across_orders() {
        for i in 1..=9 {
            let alpha = 1.0 + 0.1 * i as f64;
            let w = new_weights(alpha, 4096).unwrap();
            let r = qmatrix_report(&w);
            assert!(r.w1_negative && r.others_positive, "alpha={alpha}");
            let sums = w.partial_sums();
            let checkpoints: Vec<f64> = [256, 512, 1024, 2048, 4096].iter().map(|&k| sums[k]).collect();
            assert!(checkpoints.iter().all(|&s| s < 0.0));
            assert!(checkpoints.windows(2).all(|p| p[1] > p[0]), "alpha={alpha}");
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("spectral".parse::<Scheme>().is_err());
    }
}
