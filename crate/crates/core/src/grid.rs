use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Values on the interior nodes `x_i = i·h`, `i = 1..=n`, `h = 1/(n+1)`.
///
/// The boundary values `u_0 = u_{n+1} = 0` are implied. `alpha` is carried
/// along so the function can be evaluated off-grid with the power
/// interpolant of the matching order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    alpha: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(alpha: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("grid function needs at least one node".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at node {}", i + 1)));
        }
        Ok(Self { alpha, values })
    }

    pub fn zeros(alpha: f64, n: usize) -> Self {
        Self { alpha, values: vec![0.0; n] }
    }

    /// Samples `f` at the interior nodes.
    pub fn from_fn(alpha: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = spacing(n);
        Self::new(alpha, (1..=n).map(|i| f(i as f64 * h)).collect())
    }

    /// Fallible variant of [`GridFunction::from_fn`].
    pub fn try_from_fn(alpha: f64, n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let h = spacing(n);
        let values = (1..=n).map(|i| f(i as f64 * h)).collect::<Result<Vec<_>>>()?;
        Self::new(alpha, values)
    }

    pub(crate) fn from_values_unchecked(alpha: f64, values: Vec<f64>) -> Self {
        Self { alpha, values }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        spacing(self.n())
    }

    /// Node `x_i` for 1-based `i`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L¹ norm `h·Σ|u_i|`.
    pub fn l1_norm(&self) -> f64 {
        self.h() * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.n() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found: self.n() })
        }
    }
}

/// Grid spacing `h = 1/(n+1)`.
pub fn spacing(n: usize) -> f64 {
    1.0 / (n as f64 + 1.0)
}
