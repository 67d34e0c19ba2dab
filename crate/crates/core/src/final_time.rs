//! Reconstruction of `a(u)` from a final-time snapshot `g(x) = u(x, T)`.
//!
//! Each update solves the forward problem under the current iterate,
//! projects the equation onto the snapshot manifold, and recovers the next
//! iterate on `J = [min g, max g]`: in one dimension by cumulative
//! integration of the projected equation divided by `g_x`, in general from
//! supplied curve data via the linear-ODE solution formula in the value
//! variable.

use std::time::Instant;

use crate::coefficient::CoefficientFn;
use crate::curve::CurveSamples;
use crate::data::{check_range, ObservationKind, ObservationRecord, RangeInterval};
use crate::error::{Error, Result};
use crate::forward::{solve_forward, time_derivative_at_final, ForwardSolution, SolverConfig};
use crate::interp::linear_resample;
use crate::iteration::{
    coefficient_errors, IterationSettings, IterationTrace, ReconOptions, Termination,
};
use crate::problem::{BoundaryCondition, ProblemTemplate};
use crate::quadrature::cumulative_trapezoid;
use crate::value_ode::solve_linear_value_ode;

/// How the integration constant of the value ODE is pinned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorMode {
    /// Extract `a(g(x_lo)) g_x(x_lo)` from the impedance relation at the
    /// left end: `γ g(x_lo, T) - b(x_lo, T)`.
    BoundaryFlux,
    /// A known coefficient value at the left end of the snapshot.
    Value(f64),
}

/// Final-time reconstruction problem: the forward template without its
/// coefficient, the snapshot record on the template's grid, the anchor and
/// the exterior values of the unknown.
#[derive(Debug, Clone)]
pub struct FinalTimeProblem {
    pub template: ProblemTemplate,
    pub observation: ObservationRecord,
    pub anchor: AnchorMode,
    pub a_le: f64,
    pub a_ri: f64,
    pub options: ReconOptions,
    /// Value range of the reference solution when it is known (synthetic
    /// data); the iteration verifies the range condition against it once at
    /// entry.
    pub solution_range: Option<RangeInterval>,
}

impl FinalTimeProblem {
    pub fn new(
        template: ProblemTemplate,
        observation: ObservationRecord,
        anchor: AnchorMode,
        a_le: f64,
        a_ri: f64,
        options: ReconOptions,
    ) -> Result<Self> {
        if observation.kind != ObservationKind::FinalTime {
            return Err(Error::BadInput("final-time problem needs a snapshot record".into()));
        }
        if observation.coords.len() != template.grid.n_nodes() {
            return Err(Error::BadInput(format!(
                "snapshot has {} working nodes but the grid has {}",
                observation.coords.len(),
                template.grid.n_nodes()
            )));
        }
        let dx = template.grid.dx();
        for (i, &c) in observation.coords.iter().enumerate() {
            if (c - template.grid.node(i)).abs() > 1e-9 * (1.0 + dx) {
                return Err(Error::BadInput(
                    "snapshot working grid must coincide with the solver grid".into(),
                ));
            }
        }
        Ok(Self { template, observation, anchor, a_le, a_ri, options, solution_range: None })
    }

    pub fn with_solution_range(mut self, range: RangeInterval) -> Self {
        self.solution_range = Some(range);
        self
    }

    /// The identification interval `J` spanned by the smoothed data.
    pub fn value_interval(&self) -> (f64, f64) {
        self.observation.value_range()
    }

    /// Verify the range condition against the known solution range, with
    /// the configured slack for noise-shrunk data.
    pub fn verify_range_condition(&self) -> Result<()> {
        verify_range_condition(
            &self.observation,
            self.solution_range.as_ref(),
            self.options.range_slack,
        )
    }
}

/// Range-condition check shared by both observation types.
pub(crate) fn verify_range_condition(
    observation: &ObservationRecord,
    solution_range: Option<&RangeInterval>,
    slack_fraction: f64,
) -> Result<()> {
    let Some(range) = solution_range else { return Ok(()) };
    let (j_lo, j_hi) = observation.value_range();
    let slack = slack_fraction * (j_hi - j_lo);
    let (ok, margin) = check_range(observation, range);
    if !ok && margin < -slack {
        return Err(Error::RangeViolation { margin });
    }
    Ok(())
}

/// One fixed-point update in one space dimension: forward-solve under
/// `a_k`, integrate the projected equation in `x`, divide by `g_x`, and
/// re-index from `x` to `τ = g(x)`.
pub fn update_1d(
    problem: &FinalTimeProblem,
    a_k: &CoefficientFn,
    cfg: &SolverConfig,
) -> Result<CoefficientFn> {
    let spec = problem.template.with_coefficient(a_k.clone());
    let sol = solve_forward(&spec, cfg)?;
    update_1d_from_solution(problem, &sol)
}

fn update_1d_from_solution(
    problem: &FinalTimeProblem,
    sol: &ForwardSolution,
) -> Result<CoefficientFn> {
    let obs = &problem.observation;
    let g = &obs.smoothed;
    let gx = &obs.d1;
    let grid = &problem.template.grid;
    let t_final = problem.template.times.t_final;

    for (i, &d) in gx.iter().enumerate() {
        if !(d.abs() >= problem.options.kappa) {
            return Err(Error::DegenerateGradient {
                axis: "x",
                coordinate: grid.node(i),
                value: d.abs(),
            });
        }
    }

    let w = time_derivative_at_final(sol);
    let xs = grid.nodes();
    let integrand: Vec<f64> = (0..xs.len())
        .map(|i| w[i] - (problem.template.source)(xs[i], t_final, g[i]))
        .collect();
    let cumulative = cumulative_trapezoid(&xs, &integrand);

    // Flux of the new iterate at the left end, `a(g(x_lo)) g_x(x_lo)`.
    let left_flux = match problem.anchor {
        AnchorMode::BoundaryFlux => match &problem.template.bc_left {
            BoundaryCondition::Impedance { gamma, flux } => gamma * g[0] - flux(t_final),
            BoundaryCondition::Dirichlet { .. } => return Err(Error::AnchorUnavailable),
        },
        AnchorMode::Value(a0) => a0 * gx[0],
    };

    let alpha: Vec<f64> = (0..xs.len())
        .map(|i| (cumulative[i] + left_flux) / gx[i])
        .collect();

    coefficient_from_value_pairs(g, &alpha, problem.a_le, problem.a_ri, &problem.options)
}

/// General update from curve data: solve the value ODE
/// `a' |∇g|² + a Δg = rhs` along the curve with `a = a0` at the start of
/// the curve.
pub fn update_curve(
    curve: &CurveSamples,
    a0: f64,
    a_le: f64,
    a_ri: f64,
    options: &ReconOptions,
) -> Result<CoefficientFn> {
    curve.validate(options.kappa)?;
    let p: Vec<f64> = curve
        .laplacian_g
        .iter()
        .zip(curve.grad_norm_sq.iter())
        .map(|(&l, &g2)| l / g2)
        .collect();
    let q: Vec<f64> = curve
        .rhs_vals
        .iter()
        .zip(curve.grad_norm_sq.iter())
        .map(|(&r, &g2)| r / g2)
        .collect();
    let a_vals = solve_linear_value_ode(&curve.g_vals, &p, &q, a0);
    coefficient_from_value_pairs(&curve.g_vals, &a_vals, a_le, a_ri, options)
}

/// Re-index `(τ_m, a_m)` pairs (τ strictly monotone in either direction)
/// onto the uniform knot grid of `J = [min τ, max τ]`.
pub(crate) fn coefficient_from_value_pairs(
    tau: &[f64],
    a_vals: &[f64],
    a_le: f64,
    a_ri: f64,
    options: &ReconOptions,
) -> Result<CoefficientFn> {
    let increasing = tau[tau.len() - 1] > tau[0];
    let (ts, vs): (Vec<f64>, Vec<f64>) = if increasing {
        (tau.to_vec(), a_vals.to_vec())
    } else {
        (
            tau.iter().rev().copied().collect(),
            a_vals.iter().rev().copied().collect(),
        )
    };
    for (i, w) in ts.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    let (j_lo, j_hi) = (ts[0], ts[ts.len() - 1]);
    let n = options.knots.max(2);
    let knots: Vec<f64> = (0..n)
        .map(|i| j_lo + (j_hi - j_lo) * i as f64 / (n - 1) as f64)
        .collect();
    let values = linear_resample(&ts, &vs, &knots);
    Ok(CoefficientFn::from_knot_values(j_lo, j_hi, values)?
        .with_exterior(a_le, a_ri)
        .with_blend_width(options.resolve_blend_width(j_hi - j_lo))
        .with_floor(options.a_floor))
}

/// Repeat forward solve plus update until the sup increment drops below the
/// stopping tolerance or the cap is reached. Records errors against
/// `reference` when one is supplied.
pub fn iterate_final_time(
    problem: &FinalTimeProblem,
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
        let sol = solve_forward(&spec, cfg)?;
        let a_next = update_1d_from_solution(problem, &sol)?;
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
