//! Reconstruction of `a(u)` from a boundary time trace `h(t) = u(x0, t)`.
//!
//! Three fixed-point schemes share the machinery:
//!
//! * Scheme A integrates the equation projected onto the trace manifold as
//!   a linear ODE in the value variable (integrating-factor form).
//! * Scheme B first substitutes the impedance relation for the
//!   second-derivative term, leaving a plain cumulative integral.
//! * Scheme C relies on the impedance relation only: it re-solves the
//!   forward problem with the observed trace imposed as Dirichlet data at
//!   the sensor and reads the coefficient off the boundary-flux quotient.
//!
//! All three work on the nonuniform value grid `τ_n = h(t_n)` and re-index
//! the result onto uniform knots of `J = [min h, max h]`.

use std::time::Instant;

use crate::coefficient::CoefficientFn;
use crate::data::{ObservationKind, ObservationRecord, RangeInterval};
use crate::error::{Error, Result};
use crate::final_time::coefficient_from_value_pairs;
use crate::forward::{
    solve_forward, solve_forward_dirichlet_from_trace, ForwardSolution, Side, SolverConfig,
};
use crate::iteration::{
    coefficient_errors, IterationSettings, IterationTrace, ReconOptions, Termination,
};
use crate::problem::{BoundaryCondition, ProblemTemplate};
use crate::quadrature::cumulative_trapezoid;
use crate::value_ode::solve_linear_value_ode;

/// The three trace-based update rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Projected-equation ODE solve in the value variable.
    A,
    /// Boundary-substituted cumulative integral.
    B,
    /// Boundary-flux quotient with a Dirichlet re-solve.
    C,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::A => write!(f, "A"),
            Scheme::B => write!(f, "B"),
            Scheme::C => write!(f, "C"),
        }
    }
}

/// Time-trace reconstruction problem.
#[derive(Debug, Clone)]
pub struct TimeTraceProblem {
    pub template: ProblemTemplate,
    pub observation: ObservationRecord,
    /// Known coefficient value at `τ0 = h(0)`; when absent it is derived
    /// from the impedance relation at the sensor, which requires a
    /// non-degenerate initial boundary flux.
    pub anchor: Option<f64>,
    pub a_le: f64,
    pub a_ri: f64,
    pub options: ReconOptions,
    /// Value range of the reference solution when it is known; the
    /// iteration verifies the range condition against it once at entry.
    pub solution_range: Option<RangeInterval>,
}

impl TimeTraceProblem {
    pub fn new(
        template: ProblemTemplate,
        observation: ObservationRecord,
        anchor: Option<f64>,
        a_le: f64,
        a_ri: f64,
        options: ReconOptions,
    ) -> Result<Self> {
        let x0 = match observation.kind {
            ObservationKind::TimeTrace { x0 } => x0,
            ObservationKind::FinalTime => {
                return Err(Error::BadInput("time-trace problem needs a trace record".into()))
            }
        };
        if observation.coords.len() != template.times.n_steps + 1 {
            return Err(Error::BadInput(format!(
                "trace has {} working nodes but the time grid has {}",
                observation.coords.len(),
                template.times.n_steps + 1
            )));
        }
        let this =
            Self { template, observation, anchor, a_le, a_ri, options, solution_range: None };
        this.sensor_side(x0)?;
        Ok(this)
    }

    pub fn with_solution_range(mut self, range: RangeInterval) -> Self {
        self.solution_range = Some(range);
        self
    }

    /// Verify the range condition against the known solution range, with
    /// the configured slack for noise-shrunk data.
    pub fn verify_range_condition(&self) -> Result<()> {
        crate::final_time::verify_range_condition(
            &self.observation,
            self.solution_range.as_ref(),
            self.options.range_slack,
        )
    }

    fn x0(&self) -> f64 {
        match self.observation.kind {
            ObservationKind::TimeTrace { x0 } => x0,
            ObservationKind::FinalTime => unreachable!("validated in the constructor"),
        }
    }

    fn sensor_side(&self, x0: f64) -> Result<Side> {
        let tol = 1e-9 * (1.0 + self.template.grid.dx());
        if (x0 - self.template.grid.x_lo).abs() <= tol {
            Ok(Side::Left)
        } else if (x0 - self.template.grid.x_hi).abs() <= tol {
            Ok(Side::Right)
        } else {
            Err(Error::BadSensor { x0 })
        }
    }

    fn side(&self) -> Side {
        self.sensor_side(self.x0()).expect("validated in the constructor")
    }

    /// Impedance data `(γ, b(t))` at the sensor.
    fn sensor_impedance(&self) -> Result<(f64, crate::problem::TimeFn)> {
        let bc = match self.side() {
            Side::Left => &self.template.bc_left,
            Side::Right => &self.template.bc_right,
        };
        match bc {
            BoundaryCondition::Impedance { gamma, flux } => Ok((*gamma, flux.clone())),
            BoundaryCondition::Dirichlet { .. } => Err(Error::BadInput(
                "trace schemes need impedance data at the sensor boundary".into(),
            )),
        }
    }

    /// The identification interval `J` spanned by the smoothed trace.
    pub fn value_interval(&self) -> (f64, f64) {
        self.observation.value_range()
    }

    /// Resolve the anchor `a(h(0))`: the supplied value when present,
    /// otherwise the impedance quotient `(b(x0, 0) - γ h(0)) / ∂ν u0`.
    pub fn resolve_anchor(&self) -> Result<f64> {
        if let Some(a0) = self.anchor {
            return Ok(a0);
        }
        let (gamma, flux) = self
            .sensor_impedance()
            .map_err(|_| Error::AnchorUnavailable)?;
        let u0 = &self.template.initial;
        let dx = self.template.grid.dx();
        let n = u0.len();
        let dnu0 = match self.side() {
            Side::Left => (3.0 * u0[0] - 4.0 * u0[1] + u0[2]) / (2.0 * dx),
            Side::Right => (3.0 * u0[n - 1] - 4.0 * u0[n - 2] + u0[n - 3]) / (2.0 * dx),
        };
        if dnu0.abs() < self.options.flux_floor {
            return Err(Error::AnchorUnavailable);
        }
        let h0 = self.observation.smoothed[0];
        Ok((flux(0.0) - gamma * h0) / dnu0)
    }

    fn check_monotone(&self) -> Result<()> {
        if self.observation.monotone {
            return Ok(());
        }
        for (i, w) in self.observation.smoothed.windows(2).enumerate() {
            if !(w[1] - w[0] >= crate::data::MONOTONE_EPS) {
                return Err(Error::NonMonotone { index: i + 1 });
            }
        }
        Err(Error::NonMonotone { index: 0 })
    }
}

/// One update by the projected-equation ODE (scheme A).
pub fn update_scheme_a(
    problem: &TimeTraceProblem,
    a_k: &CoefficientFn,
    cfg: &SolverConfig,
) -> Result<CoefficientFn> {
    let spec = problem.template.with_coefficient(a_k.clone());
    let sol = solve_forward(&spec, cfg)?;
    update_a_from_solution(problem, &sol)
}

fn update_a_from_solution(
    problem: &TimeTraceProblem,
    sol: &ForwardSolution,
) -> Result<CoefficientFn> {
    problem.check_monotone()?;
    let a0 = problem.resolve_anchor()?;
    let side = problem.side();
    let grad = sol.normal_derivative(side);
    let lap = sol.boundary_second_derivative(side);
    let tau = &problem.observation.smoothed;
    let hprime = &problem.observation.d1;
    let times = &problem.observation.coords;
    let x0 = problem.x0();

    let start = leading_valid_index(&grad, problem.options.kappa, times, "t")?;
    let m = tau.len();
    let mut p = Vec::with_capacity(m - start);
    let mut q = Vec::with_capacity(m - start);
    for n in start..m {
        let g2 = grad[n] * grad[n];
        let r = (problem.template.source)(x0, times[n], tau[n]);
        p.push(lap[n] / g2);
        q.push((hprime[n] - r) / g2);
    }
    let a_vals = solve_linear_value_ode(&tau[start..], &p, &q, a0);
    coefficient_from_value_pairs_padded(problem, tau, start, &a_vals)
}

/// One update by the boundary-substituted integral (scheme B).
pub fn update_scheme_b(
    problem: &TimeTraceProblem,
    a_k: &CoefficientFn,
    cfg: &SolverConfig,
) -> Result<CoefficientFn> {
    let spec = problem.template.with_coefficient(a_k.clone());
    let sol = solve_forward(&spec, cfg)?;
    update_b_from_solution(problem, &sol)
}

fn update_b_from_solution(
    problem: &TimeTraceProblem,
    sol: &ForwardSolution,
) -> Result<CoefficientFn> {
    problem.check_monotone()?;
    let a0 = problem.resolve_anchor()?;
    let (gamma, flux) = problem.sensor_impedance()?;
    let side = problem.side();
    let grad = sol.normal_derivative(side);
    let lap = sol.boundary_second_derivative(side);
    let tau = &problem.observation.smoothed;
    let hprime = &problem.observation.d1;
    let times = &problem.observation.coords;
    let x0 = problem.x0();

    // The same boundary derivative serves as |∇u| and as the flux divisor.
    let start = leading_valid_index(&grad, problem.options.kappa.max(problem.options.flux_floor),
        times, "t")?;
    let m = tau.len();
    let mut integrand = Vec::with_capacity(m - start);
    for n in start..m {
        let g2 = grad[n] * grad[n];
        let r = (problem.template.source)(x0, times[n], tau[n]);
        let bc_term = (gamma * tau[n] - flux(times[n])) / grad[n] * lap[n];
        integrand.push((bc_term + hprime[n] - r) / g2);
    }
    let increments = cumulative_trapezoid(&tau[start..], &integrand);
    let a_vals: Vec<f64> = increments.iter().map(|v| a0 + v).collect();
    coefficient_from_value_pairs_padded(problem, tau, start, &a_vals)
}

/// One update by the boundary-flux quotient (scheme C).
pub fn update_scheme_c(
    problem: &TimeTraceProblem,
    a_k: &CoefficientFn,
    cfg: &SolverConfig,
) -> Result<CoefficientFn> {
    let spec = problem.template.with_coefficient(a_k.clone());
    let sol = solve_forward_dirichlet_from_trace(&spec, &problem.observation, cfg)?;
    update_c_from_solution(problem, &sol)
}

fn update_c_from_solution(
    problem: &TimeTraceProblem,
    dirichlet_sol: &ForwardSolution,
) -> Result<CoefficientFn> {
    problem.check_monotone()?;
    let (gamma, flux) = problem.sensor_impedance()?;
    let side = problem.side();
    let dnu = dirichlet_sol.normal_derivative(side);
    let tau = &problem.observation.smoothed;
    let times = &problem.observation.coords;

    let start = leading_flux_index(&dnu, problem.options.flux_floor, times)?;
    let a_vals: Vec<f64> = (start..tau.len())
        .map(|n| (flux(times[n]) - gamma * tau[n]) / dnu[n])
        .collect();
    coefficient_from_value_pairs_padded(problem, tau, start, &a_vals)
}

/// First index from which the boundary derivative stays above the floor.
/// A leading run of degenerate nodes (quiescent start of the experiment) is
/// tolerated; a violation after valid data is an error.
fn leading_valid_index(
    grad: &[f64],
    floor: f64,
    times: &[f64],
    axis: &'static str,
) -> Result<usize> {
    let start = grad.iter().position(|g| g.abs() >= floor).ok_or(Error::DegenerateGradient {
        axis,
        coordinate: times[0],
        value: grad[0].abs(),
    })?;
    for n in start..grad.len() {
        if grad[n].abs() < floor {
            return Err(Error::DegenerateGradient {
                axis,
                coordinate: times[n],
                value: grad[n].abs(),
            });
        }
    }
    if grad.len() - start < 2 {
        return Err(Error::DegenerateGradient {
            axis,
            coordinate: *times.last().unwrap(),
            value: grad.last().unwrap().abs(),
        });
    }
    Ok(start)
}

/// Flux-divisor variant of [`leading_valid_index`] with the dedicated error.
fn leading_flux_index(dnu: &[f64], floor: f64, times: &[f64]) -> Result<usize> {
    let start = dnu
        .iter()
        .position(|g| g.abs() >= floor)
        .ok_or(Error::DegenerateFlux { time: times[0], value: dnu[0].abs() })?;
    for n in start..dnu.len() {
        if dnu[n].abs() < floor {
            return Err(Error::DegenerateFlux { time: times[n], value: dnu[n].abs() });
        }
    }
    if dnu.len() - start < 2 {
        return Err(Error::DegenerateFlux {
            time: *times.last().unwrap(),
            value: dnu.last().unwrap().abs(),
        });
    }
    Ok(start)
}

/// Re-index `(τ_n, a_n)` for `n >= start` onto the knot grid of the full
/// `J`; values below `τ_start` take the first computed value, so a skipped
/// quiescent lead-in degrades into constant extension near `τ0`.
fn coefficient_from_value_pairs_padded(
    problem: &TimeTraceProblem,
    tau: &[f64],
    start: usize,
    a_vals: &[f64],
) -> Result<CoefficientFn> {
    if start == 0 {
        return coefficient_from_value_pairs(
            tau,
            a_vals,
            problem.a_le,
            problem.a_ri,
            &problem.options,
        );
    }
    let mut ts = Vec::with_capacity(a_vals.len() + 1);
    let mut vs = Vec::with_capacity(a_vals.len() + 1);
    ts.push(tau[0]);
    vs.push(a_vals[0]);
    ts.extend_from_slice(&tau[start..]);
    vs.extend_from_slice(a_vals);
    coefficient_from_value_pairs(&ts, &vs, problem.a_le, problem.a_ri, &problem.options)
}

/// Iterate the chosen scheme from `a_0`.
pub fn iterate_time_trace(
    problem: &TimeTraceProblem,
    scheme: Scheme,
    a_0: CoefficientFn,
    settings: &IterationSettings,
    cfg: &SolverConfig,
    reference: Option<&dyn Fn(f64) -> f64>,
) -> Result<IterationTrace> {
    let stop_tol = settings.resolve_stop_tol(&a_0);
    problem.verify_range_condition()?;

    let mut coefficients = vec![a_0];
    let mut errors = Vec::new();
    let mut increments = Vec::new();
    let mut wall = Vec::new();
    if let Some(r) = reference {
        errors.push(coefficient_errors(&coefficients[0], r));
    }

    let mut termination = Termination::MaxIterations;
    for k in 0..settings.n_iters {
        let tick = Instant::now();
        let a_k = coefficients.last().unwrap();
        let spec = problem.template.with_coefficient(a_k.clone());
        let sol = match scheme {
            Scheme::A | Scheme::B => solve_forward(&spec, cfg)?,
            Scheme::C => solve_forward_dirichlet_from_trace(&spec, &problem.observation, cfg)?,
        };
        let a_next = match scheme {
            Scheme::A => update_a_from_solution(problem, &sol)?,
            Scheme::B => update_b_from_solution(problem, &sol)?,
            Scheme::C => update_c_from_solution(problem, &sol)?,
        };
        let inc = a_next.sup_distance(a_k, crate::iteration::NORM_SAMPLES);
        if let Some(r) = reference {
            errors.push(coefficient_errors(&a_next, r));
        }
        increments.push(inc);
        wall.push(tick.elapsed());
        coefficients.push(a_next);
        if inc < stop_tol {
            termination = Termination::Converged { iterations: k + 1 };
            break;
        }
    }

    Ok(IterationTrace { coefficients, errors, increments, wall, termination })
}
