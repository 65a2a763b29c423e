//! Backward Euler time stepping for `u' = M_h u`.
//!
//! Each step solves `(I - Δt M_h) v = u`. The system matrix is lower
//! Hessenberg with nonpositive off-diagonal entries and row sums at least
//! one, i.e. a nonsingular M-matrix, so elimination without pivoting is
//! stable and all pivots stay positive.

use serde::{Deserialize, Serialize};

use crate::grid::{spacing, GridFunction};
use crate::operator::{build_operator, OperatorMatrix};
use crate::reference::{self, EigenPair};
use crate::weights::Scheme;
use crate::{check_alpha, Error, Result};

/// Initial condition descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialCondition {
    /// Normal density with mean `mu` and variance `sigma2`.
    Gaussian { mu: f64, sigma2: f64 },
    /// The principal Mittag-Leffler eigenmode `u_c`.
    Eigenfunction,
    /// `a x^(α-1) + b x^(2α-1)`; vanishes at `x = 1` only when `a + b = 0`.
    PowerLaw { a: f64, b: f64 },
    /// Explicit values at the interior nodes.
    Custom(Vec<f64>),
}

impl InitialCondition {
    /// Samples the initial condition on the `n` interior nodes.
    pub fn sample(&self, alpha: f64, n: usize) -> Result<GridFunction> {
        match self {
            InitialCondition::Gaussian { mu, sigma2 } => {
                if !(*sigma2 > 0.0) {
                    return Err(Error::Domain(format!("Gaussian variance must be positive, got {sigma2}")));
                }
                GridFunction::from_fn(alpha, n, |x| reference::gaussian_ic(x, *mu, *sigma2))
            }
            InitialCondition::Eigenfunction => {
                let pair = EigenPair::principal(alpha)?;
                GridFunction::try_from_fn(alpha, n, |x| pair.u_c(x))
            }
            InitialCondition::PowerLaw { a, b } => {
                GridFunction::from_fn(alpha, n, |x| a * x.powf(alpha - 1.0) + b * x.powf(2.0 * alpha - 1.0))
            }
            InitialCondition::Custom(values) => {
                let u = GridFunction::new(alpha, values.clone())?;
                u.check_len(n)?;
                Ok(u)
            }
        }
    }
}

/// Parameters of one backward Euler run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub alpha: f64,
    pub n: usize,
    /// Requested time step. The run uses `T / ceil(T/dt)` so that the last
    /// step lands on `T`.
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub ic: InitialCondition,
}

impl EvolutionConfig {
    /// Configuration with the default time step `dt = h^α`.
    pub fn new(alpha: f64, n: usize, t_final: f64, scheme: Scheme, ic: InitialCondition) -> Self {
        let dt = spacing(n).powf(alpha);
        Self { alpha, n, dt, t_final, scheme, ic }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.n < 3 {
            return Err(Error::Domain(format!("need n >= 3, got {}", self.n)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::Domain(format!("final time must be >= 0, got {}", self.t_final)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Domain(format!("time step must be > 0, got {}", self.dt)));
        }
        if self.t_final > 0.0 && self.dt > self.t_final {
            return Err(Error::Domain(format!("time step {} exceeds final time {}", self.dt, self.t_final)));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken.
    pub fn step_plan(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, self.dt);
        }
        let steps = (self.t_final / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (steps, self.t_final / steps as f64)
    }
}

/// LU factors of `σI - τM_h` for lower-Hessenberg Toeplitz `M_h`.
///
/// `L` is unit lower triangular and dense (stored packed by rows); `U` is
/// upper bidiagonal with a constant superdiagonal.
#[derive(Debug, Clone)]
pub struct HessenbergFactorization {
    n: usize,
    /// Strict lower triangle of `L`, row `i` at `i(i-1)/2 .. i(i+1)/2`.
    lower: Vec<f64>,
    pivots: Vec<f64>,
    superdiag: f64,
}

/// Factorizes `I - dt·M_h`.
pub fn factorize(m: &OperatorMatrix, dt: f64) -> Result<HessenbergFactorization> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("time step must be > 0, got {dt}")));
    }
    HessenbergFactorization::new(m, 1.0, dt)
}

impl HessenbergFactorization {
    /// Factorizes `shift·I - scale·M_h`.
    pub fn new(m: &OperatorMatrix, shift: f64, scale: f64) -> Result<Self> {
        let n = m.n();
        // a[d] = entry on diagonal offset d = i - j ≥ 0
        let a: Vec<f64> = (0..n)
            .map(|d| {
                let v = -scale * m.diagonal_value(d as isize);
                if d == 0 {
                    shift + v
                } else {
                    v
                }
            })
            .collect();
        let superdiag = -scale * m.diagonal_value(-1);

        let mut lower = vec![0.0; n * n.saturating_sub(1) / 2];
        let mut pivots = Vec::with_capacity(n);
        for i in 0..n {
            let row = i * i.saturating_sub(1) / 2;
            // L[i][k] = (a_{i-k} - L[i][k-1]·s) / d_k
            let mut prev = 0.0;
            for k in 0..i {
                let l = (a[i - k] - prev * superdiag) / pivots[k];
                lower[row + k] = l;
                prev = l;
            }
            let pivot = a[0] - prev * superdiag;
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::Pivot { row: i, value: pivot });
            }
            pivots.push(pivot);
        }
        Ok(Self { n, lower, pivots, superdiag })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    /// Solves the factored system for the right-hand side `b`.
    pub fn solve_slice(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let mut y = b.to_vec();
        for i in 1..self.n {
            let row = &self.lower[i * (i - 1) / 2..i * (i + 1) / 2];
            let dot: f64 = row.iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= dot;
        }
        let last = self.n - 1;
        y[last] /= self.pivots[last];
        for k in (0..last).rev() {
            y[k] = (y[k] - self.superdiag * y[k + 1]) / self.pivots[k];
        }
        Ok(y)
    }

    /// One backward Euler step: solves `(I - dt M_h) v = u`.
    pub fn step(&self, u: &GridFunction) -> Result<GridFunction> {
        u.check_len(self.n)?;
        Ok(GridFunction::from_values_unchecked(u.alpha(), self.solve_slice(u.values())?))
    }
}

/// Snapshots of a backward Euler run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    pub sup_norms: Vec<f64>,
    pub l1_norms: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &GridFunction {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Runs backward Euler from `cfg.ic` to `cfg.t_final`, reusing one factorization.
pub fn evolve(cfg: &EvolutionConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let u0 = cfg.ic.sample(cfg.alpha, cfg.n)?;
    evolve_from(cfg, u0)
}

/// As [`evolve`] but from explicit initial values.
pub fn evolve_from(cfg: &EvolutionConfig, u0: GridFunction) -> Result<Trajectory> {
    cfg.validate()?;
    u0.check_len(cfg.n)?;
    let (steps, dt) = cfg.step_plan();
    let mut traj =
        Trajectory { times: vec![0.0], sup_norms: vec![u0.sup_norm()], l1_norms: vec![u0.l1_norm()], states: vec![u0] };
    if steps == 0 {
        return Ok(traj);
    }
    let m = build_operator(cfg.alpha, cfg.n, cfg.scheme)?;
    let f = factorize(&m, dt)?;
    for k in 1..=steps {
        let next = f.step(traj.last())?;
        traj.times.push(if k == steps { cfg.t_final } else { k as f64 * dt });
        traj.sup_norms.push(next.sup_norm());
        traj.l1_norms.push(next.l1_norm());
        traj.states.push(next);
    }
    Ok(traj)
}

/// Final state only, without keeping intermediate snapshots.
pub fn evolve_final(cfg: &EvolutionConfig, u0: GridFunction) -> Result<GridFunction> {
    cfg.validate()?;
    u0.check_len(cfg.n)?;
    let (steps, dt) = cfg.step_plan();
    if steps == 0 {
        return Ok(u0);
    }
    let m = build_operator(cfg.alpha, cfg.n, cfg.scheme)?;
    let f = factorize(&m, dt)?;
    let mut u = u0;
    for _ in 0..steps {
        u = f.step(&u)?;
    }
    Ok(u)
}

/// Solves `(λI - M_h) v = g` for real `λ ≥ 0`.
pub fn resolvent_apply(m: &OperatorMatrix, lambda: f64, g: &GridFunction) -> Result<GridFunction> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("resolvent parameter must be >= 0, got {lambda}")));
    }
    g.check_len(m.n())?;
    HessenbergFactorization::new(m, lambda, 1.0)?.step(g)
}
