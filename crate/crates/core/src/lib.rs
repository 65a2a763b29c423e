//! Finite-difference solvers for the skewed fractional heat equation
//! `u_t = (d/dx)^α u` on `(0, 1)` with absorbing (Dirichlet) boundaries,
//! `1 < α ≤ 2`.
//!
//! The crate provides two spatial discretisations sharing the same
//! lower-Hessenberg Toeplitz structure:
//!
//! * [`Scheme::New`], an order-α scheme whose weights are chosen so that the
//!   discrete operator is exact on `x^(α-1)`, the boundary singularity of the
//!   Dirichlet problem;
//! * [`Scheme::Grunwald`], the shifted Grünwald-Letnikov baseline.
//!
//! Both generate Q-matrices, so the backward Euler integrator in
//! [`evolution`] preserves positivity and contracts the sup norm. The
//! [`harness`] module runs grid-refinement studies against the analytic
//! Mittag-Leffler eigenmode from [`reference`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod evolution;
pub mod grid;
pub mod harness;
pub mod interp;
pub mod operator;
pub mod reference;
pub mod specfun;
pub mod weights;

pub use error::{Error, Result};
pub use evolution::{
    evolve, evolve_final, evolve_from, factorize, resolvent_apply, EvolutionConfig, HessenbergFactorization,
    InitialCondition, Trajectory,
};
pub use grid::GridFunction;
pub use harness::{ErrorReport, ErrorRow, Norm};
pub use interp::PowerInterpolant;
pub use operator::{build_operator, closed_form_inverse, OperatorMatrix};
pub use reference::EigenPair;
pub use weights::{grunwald_weights, new_weights, Scheme, WeightSequence};

/// Checks that `alpha` lies in the admissible range `(1, 2]`.
pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha = {alpha} is outside (1, 2]")))
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
