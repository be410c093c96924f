//! Numerical kernels: adaptive quadrature, embedded Runge-Kutta stepping,
//! shape-preserving interpolation and table inversion.
//!
//! Every routine is a pure function of its arguments and is generic over
//! [`Real`].

mod interp;
mod ode;
mod quad;

pub use interp::{interp_monotone, invert_monotone, Table1D};
pub use ode::solve_ode;
pub use quad::{integrate, integrate_to_infinity};

use thiserror::Error;

use crate::real::Real;

/// Accuracy controls for quadrature and ODE integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum bisection depth for adaptive quadrature.
    pub max_depth: usize,
    /// Maximum number of attempted steps for the ODE solver.
    pub max_steps: usize,
}

impl<T: Real> ToleranceSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_depth: usize) -> Result<Self, NumericsError> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_depth,
            max_steps: 1_000_000,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > T::zero()) || !self.rel_tol.is_finite() {
            return Err(NumericsError::InvalidTolerance(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= T::zero()) || !self.abs_tol.is_finite() {
            return Err(NumericsError::InvalidTolerance(format!(
                "abs_tol must be >= 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth < 1 || self.max_steps < 1 {
            return Err(NumericsError::InvalidTolerance(
                "max_depth and max_steps must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Same spec with relative and absolute tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    pub fn with_abs_tol(self, abs_tol: T) -> Self {
        Self { abs_tol, ..self }
    }
}

impl<T: Real> Default for ToleranceSpec<T> {
    /// `rel_tol = 1e-8`, raised to a small multiple of machine epsilon for
    /// low-precision scalars.
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(64.0);
        Self {
            rel_tol: T::lit(1e-8).max(floor),
            abs_tol: T::zero(),
            max_depth: 48,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("integrand is not finite at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },
    #[error("quadrature depth exhausted on [{a:e}, {b:e}]; best estimate {estimate:e}")]
    DepthExhausted { a: f64, b: f64, estimate: f64 },
    #[error("invalid integration interval [{a:e}, {b:e}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("ODE step size underflow at t = {t:e} (stiff or singular problem)")]
    StepUnderflow { t: f64 },
    #[error("ODE step budget of {steps} exhausted at t = {t:e}")]
    StepBudget { t: f64, steps: usize },
    #[error("ODE right-hand side is not finite at t = {t:e}, y = {y:e}")]
    NonFiniteRhs { t: f64, y: f64 },
    #[error("value {value:e} outside table range [{lo:e}, {hi:e}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("table values are not strictly monotone")]
    NotMonotone,
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}
