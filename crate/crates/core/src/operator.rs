//! The bounded-domain generator `M_h`.
//!
//! `M_h = h^-α T` with `T` lower-Hessenberg Toeplitz, `T[i][j] = w_{i-j+1}`
//! for `i - j ≥ -1` and zero above the first superdiagonal. Only the
//! weight vector is stored; dense copies are produced on request.

use ndarray::Array2;

use crate::grid::{spacing, GridFunction};
use crate::specfun::gamma;
use crate::weights::{Scheme, WeightSequence};
use crate::{check_alpha, Error, KahanSum, Result};

/// Toeplitz-compressed generator matrix for `n` interior nodes.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    n: usize,
    h: f64,
    /// `h^-α`
    scale: f64,
    weights: WeightSequence,
}

/// Builds `M_h` for `n ≥ 3` interior nodes.
pub fn build_operator(alpha: f64, n: usize, scheme: Scheme) -> Result<OperatorMatrix> {
    check_alpha(alpha)?;
    if n < 3 {
        return Err(Error::Domain(format!("operator needs n >= 3 interior nodes, got {n}")));
    }
    let h = spacing(n);
    Ok(OperatorMatrix { n, h, scale: h.powf(-alpha), weights: scheme.weights(alpha, n)? })
}

impl OperatorMatrix {
    pub fn alpha(&self) -> f64 {
        self.weights.alpha()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn scheme(&self) -> Scheme {
        self.weights.scheme()
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    /// `h^-α`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Toeplitz symbol entry for diagonal offset `d = i - j` (0-based),
    /// i.e. `w_{d+1}/h^α` for `d ≥ -1`.
    pub fn diagonal_value(&self, offset: isize) -> f64 {
        if offset < -1 {
            0.0
        } else {
            self.weights.get((offset + 1) as usize) * self.scale
        }
    }

    /// Entry `(i, j)`, 0-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.diagonal_value(i as isize - j as isize)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.n), |(i, j)| self.entry(i, j))
    }

    /// Row sums of `M_h`.
    pub fn row_sums(&self) -> Vec<f64> {
        let sums = self.weights.partial_sums();
        // row i (0-based) holds w_0..=w_{i+1}; the last row lacks w_0
        (0..self.n)
            .map(|i| {
                if i + 1 < self.n {
                    sums[i + 1] * self.scale
                } else {
                    (sums[self.n] - self.weights.get(0)) * self.scale
                }
            })
            .collect()
    }

    /// `M_h u` with the implied boundary values `u_0 = u_{n+1} = 0`.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        u.check_len(self.n)?;
        Ok(GridFunction::from_values_unchecked(u.alpha(), self.apply_slice(u.values(), 0.0)))
    }

    /// The scheme applied at the interior nodes with a nonzero value
    /// `u_{n+1}` at `x = 1`, as needed for data in `C_0(0,1]`.
    pub fn apply_with_boundary(&self, u: &GridFunction, right: f64) -> Result<GridFunction> {
        u.check_len(self.n)?;
        Ok(GridFunction::from_values_unchecked(u.alpha(), self.apply_slice(u.values(), right)))
    }

    pub(crate) fn apply_slice(&self, u: &[f64], right: f64) -> Vec<f64> {
        let w = self.weights.as_slice();
        let n = self.n;
        (0..n)
            .map(|r| {
                let mut acc = KahanSum::default();
                // v_r = w_0 u_{r+1} + Σ_{k=1}^{r+1} w_k u_{r+1-k}, largest k first
                for k in (1..=r + 1).rev() {
                    acc.add(w[k] * u[r + 1 - k]);
                }
                let next = if r + 1 < n { u[r + 1] } else { right };
                acc.add(w[0] * next);
                acc.value() * self.scale
            })
            .collect()
    }

    /// Dense `M_h^-1` from its closed form; new scheme only.
    pub fn closed_form_inverse(&self) -> Result<Array2<f64>> {
        if self.scheme() != Scheme::New {
            return Err(Error::Domain("closed-form inverse exists for the new scheme only".into()));
        }
        closed_form_inverse(self.alpha(), self.n)
    }
}

/// Dense inverse of the new-scheme `M_h`:
///
/// `X[i][j] = h [H(i-j) ((i-j)h)^(α-1) - (ih)^(α-1) (1-jh)^(α-1)] / Γ(α)`
///
/// with 1-based indices; the `i = j` Heaviside term vanishes since `α > 1`.
pub fn closed_form_inverse(alpha: f64, n: usize) -> Result<Array2<f64>> {
    check_alpha(alpha)?;
    if n < 3 {
        return Err(Error::Domain(format!("operator needs n >= 3 interior nodes, got {n}")));
    }
    let h = spacing(n);
    let beta = alpha - 1.0;
    let c = h / gamma(alpha)?;
    Ok(Array2::from_shape_fn((n, n), |(r, s)| {
        let (i, j) = (r + 1, s + 1);
        let causal = if i > j { ((i - j) as f64 * h).powf(beta) } else { 0.0 };
        c * (causal - (i as f64 * h).powf(beta) * (1.0 - j as f64 * h).powf(beta))
    }))
}

/// Max-norm residual of the exactness property: the scheme applied to
/// samples of `x^(α-1)` at `x_0..=x_n` must give `Γ(α)/h` in the first row
/// and zero elsewhere. Normalised by `Γ(α)/h`.
///
/// The sample at `x_n` that the last row needs lies outside the Dirichlet
/// grid and is supplied as the right boundary value.
pub fn exactness_residual(alpha: f64, n: usize) -> Result<f64> {
    let m = build_operator(alpha, n, Scheme::New)?;
    let h = m.h();
    let beta = alpha - 1.0;
    let samples: Vec<f64> = (0..n).map(|i| (i as f64 * h).powf(beta)).collect();
    let right = (n as f64 * h).powf(beta);
    let v = m.apply_slice(&samples, right);
    let target = gamma(alpha)? / h;
    let worst = v.iter().enumerate().map(|(i, &x)| (x - if i == 0 { target } else { 0.0 }).abs()).fold(0.0, f64::max);
    Ok(worst / target)
}
