//! Error type shared across the library.

use thiserror::Error;

/// Errors raised by solvers, the data pipeline and the reconstruction schemes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input to a constructor or operation.
    #[error("invalid input: {0}")]
    BadInput(String),

    /// The per-step nonlinear iteration hit its iteration cap.
    #[error("nonlinear iteration did not converge at time step {step} (residual {residual:.3e})")]
    NonConvergence { step: usize, residual: f64 },

    /// Non-finite values appeared during time stepping.
    #[error("solution blew up at time step {step} (non-finite values)")]
    BlowUp { step: usize },

    /// Sensor location does not coincide with a grid node.
    #[error("sensor location {x0} is not a grid node")]
    BadSensor { x0: f64 },

    /// A time trace cannot be mapped onto the solver time grid.
    #[error("trace cannot be mapped onto the solver time grid: {reason}")]
    TraceMismatch { reason: String },

    /// Trace values are not strictly monotone; reports the first violating index.
    #[error("trace values not strictly monotone at index {index}")]
    NonMonotone { index: usize },

    /// Curve values are not strictly monotone in the curve parameter.
    #[error("curve values not strictly monotone at index {index}")]
    NonMonotoneCurve { index: usize },

    /// A gradient that a scheme divides by dropped below its floor.
    #[error("|gradient| = {value:.3e} below floor at {axis} = {coordinate:.6}")]
    DegenerateGradient {
        /// Which coordinate the location refers to ("x", "t" or "sigma").
        axis: &'static str,
        coordinate: f64,
        value: f64,
    },

    /// A boundary flux that a scheme divides by dropped below its floor.
    #[error("|boundary flux| = {value:.3e} below floor at t = {time:.6}")]
    DegenerateFlux { time: f64, value: f64 },

    /// The observed data range does not contain the solution range.
    #[error("observed range misses the solution range by {margin:.3e}")]
    RangeViolation { margin: f64 },

    /// An anchor value is required (degenerate initial flux) but was not supplied.
    #[error("anchor value required but not supplied (initial boundary flux is degenerate)")]
    AnchorUnavailable,

    /// Malformed observation CSV.
    #[error("observation csv, line {line}: {reason}")]
    Csv { line: usize, reason: String },

    /// Underlying I/O failure (path and message).
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
