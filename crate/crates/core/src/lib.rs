//! Identification of a solution-dependent diffusion coefficient `a(u)` in
//! the nonlinear parabolic equation
//!
//! ```text
//! u_t - (a(u) u_x)_x = r(x, t, u)
//! ```
//!
//! from overposed data: either a final-time snapshot `g(x) = u(x, T)` or a
//! boundary time trace `h(t) = u(x0, t)`. The crate provides
//!
//! * a Crank–Nicolson forward solver with impedance or Dirichlet boundary
//!   conditions and per-step Picard closure of the nonlinearity,
//! * a data pipeline that samples a reference solve, adds noise, smooths
//!   with first/second-difference Tikhonov filters and differentiates,
//! * fixed-point reconstruction schemes for both observation types, built
//!   on the exact solution of a first-order linear ODE in the value
//!   variable,
//! * iteration bookkeeping with error norms against a reference
//!   coefficient.

pub mod coefficient;
pub mod curve;
pub mod data;
pub mod error;
pub mod field;
pub mod final_time;
pub mod forward;
pub mod grid;
pub mod interp;
pub mod iteration;
pub mod linalg;
pub mod problem;
pub mod quadrature;
pub mod time_trace;
pub mod value_ode;

pub use coefficient::CoefficientFn;
pub use curve::CurveSamples;
pub use data::{
    add_noise, add_noise_with, check_range, invert_trace, read_observation_csv,
    sample_observation, smooth_h1, smooth_h2, FilterWeight, MonotoneInverse, NoiseModel,
    ObservationKind, ObservationRecord, RangeInterval,
};
pub use error::{Error, Result};
pub use field::SpaceTimeField;
pub use final_time::{iterate_final_time, update_1d, update_curve, AnchorMode, FinalTimeProblem};
pub use forward::{
    solve_forward, solve_forward_dirichlet_from_trace, time_derivative_at_final, ForwardSolution,
    Side, SolverConfig,
};
pub use grid::{SpatialGrid, TimeGrid};
pub use iteration::{
    coefficient_errors, reference_l2_norm, ErrorNorms, IterationSettings, IterationTrace,
    ReconOptions, Termination,
};
pub use problem::{
    source_fn, time_fn, zero_source, BoundaryCondition, ProblemSpec, ProblemTemplate, SourceFn,
    TimeFn,
};
pub use time_trace::{
    iterate_time_trace, update_scheme_a, update_scheme_b, update_scheme_c, Scheme,
    TimeTraceProblem,
};
