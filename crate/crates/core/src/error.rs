//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a domain constraint (non-positive rate, inverted
    /// time window, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance. Carries the partial estimate so callers can
    /// decide whether it is still usable.
    #[error(
        "quadrature did not converge: requested rel_tol {requested:.3e}, achieved {achieved:.3e} (partial estimate {partial:.6e})"
    )]
    QuadratureConvergence {
        partial: f64,
        achieved: f64,
        requested: f64,
    },

    /// The ODE integrator underflowed its step size (stiffness or an
    /// inconsistent configuration).
    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// Trace of the density matrix drifted beyond tolerance during
    /// integration; the trajectory cannot be trusted.
    #[error("density-matrix trace drifted by {drift:.3e} at t = {t:.6e}")]
    TraceDrift { t: f64, drift: f64 },

    /// A requested grid would exceed the memory budget.
    #[error("grid of {requested} points exceeds the budget of {max}")]
    GridTooLarge { requested: usize, max: usize },

    /// Malformed input data (CSV amplitude tables and the like).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
