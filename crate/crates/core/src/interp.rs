//! Piecewise power interpolation.
//!
//! On each cell `[x_i, x_{i+1}]` the interpolant lies in `span{1, x^(α-1)}`,
//! so it reproduces `a·x^(α-1)` exactly and reduces to piecewise-linear
//! interpolation when `α = 2`.

use crate::grid::{spacing, GridFunction};
use crate::{check_alpha, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerInterpolant {
    alpha: f64,
    h: f64,
    /// `y_0..=y_{n+1}`; `y_0 = 0` always.
    y: Vec<f64>,
}

impl PowerInterpolant {
    /// Interpolant of the Dirichlet data `y_1..y_n` (`y_0 = y_{n+1} = 0`).
    pub fn from_grid(u: &GridFunction) -> Result<Self> {
        Self::with_right_value(u, 0.0)
    }

    /// Interpolant with a free value `y_{n+1}` at `x = 1`, for `C_0(0,1]` data.
    pub fn with_right_value(u: &GridFunction, right: f64) -> Result<Self> {
        check_alpha(u.alpha())?;
        let mut y = Vec::with_capacity(u.n() + 2);
        y.push(0.0);
        y.extend_from_slice(u.values());
        y.push(right);
        Ok(Self { alpha: u.alpha(), h: u.h(), y })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.y.len() - 2
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node values `y_0..=y_{n+1}`.
    pub fn node_values(&self) -> &[f64] {
        &self.y
    }

    /// Evaluates the interpolant at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("interpolation point {x} outside [0, 1]")));
        }
        let s = x / self.h;
        let nearest = s.round();
        if (s - nearest).abs() <= 4.0 * f64::EPSILON * nearest.max(1.0) {
            return Ok(self.y[(nearest as usize).min(self.y.len() - 1)]);
        }
        let last_cell = self.y.len() - 2;
        let mut i = ((x / self.h).floor() as usize).min(last_cell);
        // nodes belong to the cell on their left
        if i > 0 && x <= i as f64 * self.h {
            i -= 1;
        }
        let theta = self.cell_fraction(i, x);
        Ok((1.0 - theta) * self.y[i] + theta * self.y[i + 1])
    }

    /// `(x^β - x_i^β) / (x_{i+1}^β - x_i^β)` clamped to `[0, 1]`, β = α - 1.
    fn cell_fraction(&self, i: usize, x: f64) -> f64 {
        let beta = self.alpha - 1.0;
        let theta = if i == 0 {
            (x / self.h).powf(beta)
        } else {
            let xi = i as f64 * self.h;
            // both differences share the factor x_i^β, which cancels
            let num = (beta * ((x - xi) / xi).ln_1p()).exp_m1();
            let den = (beta * (1.0 / i as f64).ln_1p()).exp_m1();
            num / den
        };
        theta.clamp(0.0, 1.0)
    }
}

/// `Π_n f`: samples `f` at the interior nodes, Dirichlet variant (`y_{n+1} = 0`).
pub fn project(f: impl Fn(f64) -> f64, alpha: f64, n: usize) -> Result<PowerInterpolant> {
    PowerInterpolant::from_grid(&GridFunction::from_fn(alpha, n, f)?)
}

/// `Π_n f` for `f ∈ C_0(0,1]`: also samples `f(1)`.
pub fn project_open_right(f: impl Fn(f64) -> f64, alpha: f64, n: usize) -> Result<PowerInterpolant> {
    let right = f(1.0);
    PowerInterpolant::with_right_value(&GridFunction::from_fn(alpha, n, f)?, right)
}

/// Sup-norm distance between `Π_n f` and `f`, sampled at `per_cell` equally
/// spaced points inside every cell (nodes excluded, where the error is zero).
pub fn projection_error(f: impl Fn(f64) -> f64, alpha: f64, n: usize, per_cell: usize) -> Result<f64> {
    let values: Vec<f64> = (1..=n).map(|i| f(i as f64 * spacing(n))).collect();
    let p = PowerInterpolant::from_grid(&GridFunction::new(alpha, values)?)?;
    let h = spacing(n);
    let mut worst: f64 = 0.0;
    for cell in 0..=n {
        for k in 1..=per_cell {
            let x = (cell as f64 + k as f64 / (per_cell as f64 + 1.0)) * h;
            worst = worst.max((p.eval(x)? - f(x)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_boundary_power_exactly() {
        let mut rng_x = 0.123_456_789_f64;
        for alpha in [1.2, 1.5, 1.8] {
            let a = -2.5;
            let p = project_open_right(|x| a * x.powf(alpha - 1.0), alpha, 37).unwrap();
            for _ in 0..1000 {
                // deterministic low-discrepancy sweep of [0, 1]
                rng_x = (rng_x + 0.618_033_988_749_895) % 1.0;
                let exact = a * rng_x.powf(alpha - 1.0);
                assert!((p.eval(rng_x).unwrap() - exact).abs() <= 1e-13, "alpha={alpha} x={rng_x}");
            }
            assert!((p.eval(1.0).unwrap() - a).abs() <= 1e-15);
            assert_eq!(p.eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_at_alpha_two() {
        let u = GridFunction::new(2.0, vec![1.0, 4.0, -2.0]).unwrap();
        let p = PowerInterpolant::from_grid(&u).unwrap();
        assert!((p.eval(0.375).unwrap() - 2.5).abs() <= 1e-15);
        assert!((p.eval(0.625).unwrap() - 1.0).abs() <= 1e-15);
        assert!((p.eval(0.125).unwrap() - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn zero_data_and_domain() {
        let p = project(|_| 0.0, 1.5, 10).unwrap();
        assert_eq!(p.eval(0.37).unwrap(), 0.0);
        assert!(matches!(p.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(p.eval(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn first_cell_is_scaled_power() {
        let alpha = 1.3;
        let u = GridFunction::new(alpha, vec![2.0, 1.0, 0.5, 0.25]).unwrap();
        let p = PowerInterpolant::from_grid(&u).unwrap();
        let h = u.h();
        for x in [0.01, 0.05, 0.1, 0.19] {
            let expected = 2.0 * (x / h).powf(alpha - 1.0);
            assert!((p.eval(x).unwrap() - expected).abs() <= 1e-14);
        }
    }

    #[test]
    fn projection_rate_on_smooth_domain_function() {
        // f = x^(α-1) - x^(2α-1) behaves like the domain functions near 0 and vanishes at 1.
        let alpha = 1.5;
        let f = |x: f64| x.powf(alpha - 1.0) - x.powf(2.0 * alpha - 1.0);
        let ns = [32, 64, 128, 256];
        let chain: Vec<(f64, f64)> =
            ns.iter().map(|&n| (spacing(n), projection_error(f, alpha, n, 7).unwrap())).collect();
        let order = crate::harness::observed_order(&chain).unwrap();
        assert!(order >= alpha - 0.2, "order = {order}");
    }

    proptest! {
        #[test]
        fn nodes_are_reproduced(values in prop::collection::vec(-10.0f64..10.0, 3..40), alpha in 1.05f64..2.0) {
            let u = GridFunction::new(alpha, values.clone()).unwrap();
            let p = PowerInterpolant::from_grid(&u).unwrap();
            for (i, v) in values.iter().enumerate() {
                let x = u.node(i + 1);
                prop_assert!((p.eval(x).unwrap() - v).abs() <= 1e-14 * (1.0 + v.abs()));
            }
        }

        #[test]
        fn cells_are_monotone(values in prop::collection::vec(-5.0f64..5.0, 3..20), alpha in 1.05f64..2.0, t in 0.0f64..1.0) {
            let u = GridFunction::new(alpha, values).unwrap();
            let p = PowerInterpolant::from_grid(&u).unwrap();
            let x = t;
            let y = p.node_values();
            let i = ((x / u.h()).floor() as usize).min(y.len() - 2);
            let (lo, hi) = (y[i].min(y[i + 1]), y[i].max(y[i + 1]));
            let v = p.eval(x).unwrap();
            prop_assert!(v >= lo - 1e-14 && v <= hi + 1e-14);
        }
    }
}
