//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by grid construction, field algebra and the solvers.
#[derive(Debug, Error)]
pub enum EmhdError {
    /// Grid parameters violate a documented precondition.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation required zero-mean input but the mean was not zero.
    #[error("nonzero mean: |mean| = {0:.3e} exceeds tolerance")]
    NonZeroMean(f64),

    /// The time integration produced a non-finite value.
    #[error("non-finite value encountered at t = {t:.6e}")]
    NonFinite {
        /// Simulation time at which the first non-finite value appeared.
        t: f64,
    },

    /// Initial data does not satisfy a lab precondition.
    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),
}
