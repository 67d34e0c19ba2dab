//! Implicit finite-volume solver for `u_t - (a(u) u_x)_x = r(x, t, u)` in one
//! space dimension, with impedance or Dirichlet boundary conditions.
//!
//! Time stepping is the θ-scheme (θ = 1/2 gives Crank–Nicolson). The
//! nonlinearity is closed per step by Picard iteration: face coefficients
//! `a` and the source are frozen at the previous iterate, leaving one
//! tridiagonal solve per sweep. Impedance conditions enter through the
//! half-cell flux balance so the boundary rows stay second-order accurate
//! and tridiagonal.

use crate::data::{ObservationKind, ObservationRecord};
use crate::error::{Error, Result};
use crate::field::SpaceTimeField;
use crate::interp::linear_resample;
use crate::linalg::solve_tridiagonal;
use crate::problem::{BoundaryCondition, ProblemSpec};

/// Per-step nonlinear closure controls and the time weighting.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Sup-norm tolerance on successive Picard iterates.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Time weighting; 0.5 is Crank–Nicolson, 1.0 backward Euler.
    pub theta: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { picard_tol: 1e-10, picard_max_iter: 50, theta: 0.5 }
    }
}

/// Which end of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Discrete forward solution plus boundary flux traces and iteration
/// telemetry.
#[derive(Debug, Clone)]
pub struct ForwardSolution {
    pub field: SpaceTimeField,
    /// `a(u) ∂ν u` at the left end, one value per time node.
    pub flux_left: Vec<f64>,
    /// `a(u) ∂ν u` at the right end, one value per time node.
    pub flux_right: Vec<f64>,
    /// Picard sweeps taken at each time step.
    pub picard_counts: Vec<usize>,
}

impl ForwardSolution {
    /// Outward normal derivative `∂ν u` at a boundary per time node,
    /// from the one-sided second-order stencil.
    pub fn normal_derivative(&self, side: Side) -> Vec<f64> {
        let dx = self.field.grid.dx();
        let last = self.field.grid.n_nodes() - 1;
        (0..=self.field.times.n_steps)
            .map(|n| {
                let u = self.field.step(n);
                match side {
                    Side::Left => (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * dx),
                    Side::Right => (3.0 * u[last] - 4.0 * u[last - 1] + u[last - 2]) / (2.0 * dx),
                }
            })
            .collect()
    }

    /// Second spatial derivative at a boundary per time node, from the
    /// one-sided second-order four-point stencil.
    pub fn boundary_second_derivative(&self, side: Side) -> Vec<f64> {
        let dx = self.field.grid.dx();
        let dx2 = dx * dx;
        let last = self.field.grid.n_nodes() - 1;
        (0..=self.field.times.n_steps)
            .map(|n| {
                let u = self.field.step(n);
                match side {
                    Side::Left => (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / dx2,
                    Side::Right => {
                        (2.0 * u[last] - 5.0 * u[last - 1] + 4.0 * u[last - 2] - u[last - 3]) / dx2
                    }
                }
            })
            .collect()
    }

    /// Boundary value trace at one end.
    pub fn boundary_values(&self, side: Side) -> Vec<f64> {
        match side {
            Side::Left => self.field.trace_at_node(0),
            Side::Right => self.field.trace_at_node(self.field.grid.n_nodes() - 1),
        }
    }
}

/// Semi-discrete right-hand side of `du/dt = L u + (boundary data terms)`
/// evaluated at a known profile; excludes the source term.
fn apply_operator(spec: &ProblemSpec, u: &[f64], t: f64, out: &mut [f64]) {
    let n = spec.grid.n_nodes();
    let dx = spec.grid.dx();
    let dx2 = dx * dx;
    let a = &spec.coefficient;

    for i in 1..n - 1 {
        let aw = a.value(0.5 * (u[i - 1] + u[i]));
        let ae = a.value(0.5 * (u[i] + u[i + 1]));
        out[i] = (aw * (u[i - 1] - u[i]) + ae * (u[i + 1] - u[i])) / dx2;
    }
    match &spec.bc_left {
        BoundaryCondition::Impedance { gamma, flux } => {
            let ae = a.value(0.5 * (u[0] + u[1]));
            out[0] = 2.0 / dx * (ae * (u[1] - u[0]) / dx - gamma * u[0] + flux(t));
        }
        BoundaryCondition::Dirichlet { .. } => out[0] = 0.0,
    }
    match &spec.bc_right {
        BoundaryCondition::Impedance { gamma, flux } => {
            let aw = a.value(0.5 * (u[n - 2] + u[n - 1]));
            out[n - 1] = 2.0 / dx * (aw * (u[n - 2] - u[n - 1]) / dx - gamma * u[n - 1] + flux(t));
        }
        BoundaryCondition::Dirichlet { .. } => out[n - 1] = 0.0,
    }
}

/// Solve the forward problem.
pub fn solve_forward(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<ForwardSolution> {
    spec.validate()?;
    if !(cfg.picard_tol > 0.0) || cfg.picard_max_iter == 0 {
        return Err(Error::BadInput("solver needs picard_tol > 0 and max_iter >= 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.theta) {
        return Err(Error::BadInput(format!("theta must lie in [0, 1], got {}", cfg.theta)));
    }

    let n = spec.grid.n_nodes();
    let steps = spec.times.n_steps;
    let dx = spec.grid.dx();
    let dt = spec.times.dt();
    let lam = dt / (dx * dx);
    let theta = cfg.theta;
    let a = &spec.coefficient;

    let mut values = Vec::with_capacity(n * (steps + 1));
    values.extend_from_slice(&spec.initial);
    let mut picard_counts = Vec::with_capacity(steps);

    let mut u_old = spec.initial.clone();
    let mut lu_old = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut lower = vec![0.0; n - 1];
    let mut upper = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n];

    for step in 0..steps {
        let t0 = spec.times.time(step);
        let t1 = spec.times.time(step + 1);
        apply_operator(spec, &u_old, t0, &mut lu_old);

        let mut v = u_old.clone();
        let mut converged = false;
        let mut sweeps = 0;
        let mut residual = f64::INFINITY;
        while sweeps < cfg.picard_max_iter {
            sweeps += 1;
            // Interior rows with face coefficients frozen at the iterate.
            for i in 1..n - 1 {
                let aw = a.value(0.5 * (v[i - 1] + v[i]));
                let ae = a.value(0.5 * (v[i] + v[i + 1]));
                diag[i] = 1.0 + theta * lam * (aw + ae);
                lower[i - 1] = -theta * lam * aw;
                upper[i] = -theta * lam * ae;
                rhs[i] = u_old[i]
                    + (1.0 - theta)
                        * dt
                        * (lu_old[i] + (spec.source)(spec.grid.node(i), t0, u_old[i]))
                    + theta * dt * (spec.source)(spec.grid.node(i), t1, v[i]);
            }
            match &spec.bc_left {
                BoundaryCondition::Impedance { gamma, flux } => {
                    let ae = a.value(0.5 * (v[0] + v[1]));
                    diag[0] = 1.0 + 2.0 * theta * lam * ae + 2.0 * theta * dt * gamma / dx;
                    upper[0] = -2.0 * theta * lam * ae;
                    rhs[0] = u_old[0]
                        + (1.0 - theta)
                            * dt
                            * (lu_old[0] + (spec.source)(spec.grid.node(0), t0, u_old[0]))
                        + theta
                            * dt
                            * (2.0 / dx * flux(t1) + (spec.source)(spec.grid.node(0), t1, v[0]));
                }
                BoundaryCondition::Dirichlet { trace } => {
                    diag[0] = 1.0;
                    upper[0] = 0.0;
                    rhs[0] = trace(t1);
                }
            }
            match &spec.bc_right {
                BoundaryCondition::Impedance { gamma, flux } => {
                    let aw = a.value(0.5 * (v[n - 2] + v[n - 1]));
                    diag[n - 1] = 1.0 + 2.0 * theta * lam * aw + 2.0 * theta * dt * gamma / dx;
                    lower[n - 2] = -2.0 * theta * lam * aw;
                    rhs[n - 1] = u_old[n - 1]
                        + (1.0 - theta)
                            * dt
                            * (lu_old[n - 1]
                                + (spec.source)(spec.grid.node(n - 1), t0, u_old[n - 1]))
                        + theta
                            * dt
                            * (2.0 / dx * flux(t1)
                                + (spec.source)(spec.grid.node(n - 1), t1, v[n - 1]));
                }
                BoundaryCondition::Dirichlet { trace } => {
                    diag[n - 1] = 1.0;
                    lower[n - 2] = 0.0;
                    rhs[n - 1] = trace(t1);
                }
            }

            let mut v_new = solve_tridiagonal(&lower, &diag, &upper, &rhs);
            if v_new.iter().any(|x| !x.is_finite()) {
                return Err(Error::BlowUp { step });
            }
            residual = v_new
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            // Plain iteration can settle into a two-cycle on sharply varying
            // coefficients; damp the tail sweeps to break it.
            if sweeps > 8 {
                for (x, &old) in v_new.iter_mut().zip(v.iter()) {
                    *x = 0.5 * (*x + old);
                }
            }
            v = v_new;
            if residual < cfg.picard_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { step, residual });
        }
        picard_counts.push(sweeps);
        values.extend_from_slice(&v);
        u_old = v;
    }

    let field = SpaceTimeField::new(spec.grid.clone(), spec.times.clone(), values)?;
    let flux_left = flux_trace(spec, &field, Side::Left);
    let flux_right = flux_trace(spec, &field, Side::Right);
    Ok(ForwardSolution { field, flux_left, flux_right, picard_counts })
}

/// Boundary flux `a(u) ∂ν u` per time node: the imposed relation for
/// impedance ends, the one-sided stencil for Dirichlet ends.
fn flux_trace(spec: &ProblemSpec, field: &SpaceTimeField, side: Side) -> Vec<f64> {
    let bc = match side {
        Side::Left => &spec.bc_left,
        Side::Right => &spec.bc_right,
    };
    let node = match side {
        Side::Left => 0,
        Side::Right => spec.grid.n_nodes() - 1,
    };
    let dx = spec.grid.dx();
    (0..=spec.times.n_steps)
        .map(|n| {
            let u = field.step(n);
            match bc {
                BoundaryCondition::Impedance { gamma, flux } => {
                    flux(field.times.time(n)) - gamma * u[node]
                }
                BoundaryCondition::Dirichlet { .. } => {
                    let dnu = match side {
                        Side::Left => (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * dx),
                        Side::Right => {
                            (3.0 * u[node] - 4.0 * u[node - 1] + u[node - 2]) / (2.0 * dx)
                        }
                    };
                    spec.coefficient.value(u[node]) * dnu
                }
            }
        })
        .collect()
}

/// Solve the forward problem with the boundary condition at the sensor
/// replaced by Dirichlet data taken from an observed time trace; the other
/// end keeps its original condition.
pub fn solve_forward_dirichlet_from_trace(
    spec: &ProblemSpec,
    trace: &ObservationRecord,
    cfg: &SolverConfig,
) -> Result<ForwardSolution> {
    let x0 = match trace.kind {
        ObservationKind::TimeTrace { x0 } => x0,
        ObservationKind::FinalTime => {
            return Err(Error::TraceMismatch {
                reason: "record holds final-time data, not a time trace".into(),
            })
        }
    };
    let side = if (x0 - spec.grid.x_lo).abs() <= 1e-9 * (1.0 + spec.grid.dx()) {
        Side::Left
    } else if (x0 - spec.grid.x_hi).abs() <= 1e-9 * (1.0 + spec.grid.dx()) {
        Side::Right
    } else {
        return Err(Error::BadSensor { x0 });
    };

    let t_nodes = spec.times.times();
    let span_ok = trace.coords.first().map(|&c| c <= 1e-9).unwrap_or(false)
        && trace
            .coords
            .last()
            .map(|&c| c >= spec.times.t_final - 1e-9 * spec.times.t_final.max(1.0))
            .unwrap_or(false);
    if !span_ok {
        return Err(Error::TraceMismatch {
            reason: format!(
                "trace covers [{:.6}, {:.6}] but the solver needs [0, {:.6}]",
                trace.coords.first().copied().unwrap_or(f64::NAN),
                trace.coords.last().copied().unwrap_or(f64::NAN),
                spec.times.t_final
            ),
        });
    }
    let h = linear_resample(&trace.coords, &trace.smoothed, &t_nodes);
    let dt = spec.times.dt();
    let t_final = spec.times.t_final;
    let data = std::sync::Arc::new(h);
    let data_bc = data.clone();
    let bc = BoundaryCondition::Dirichlet {
        trace: std::sync::Arc::new(move |t: f64| {
            let s = (t.clamp(0.0, t_final)) / dt;
            let i = (s.floor() as usize).min(data_bc.len() - 2);
            let w = s - i as f64;
            data_bc[i] * (1.0 - w) + data_bc[i + 1] * w
        }),
    };

    let mut dirichlet_spec = spec.clone();
    match side {
        Side::Left => dirichlet_spec.bc_left = bc,
        Side::Right => dirichlet_spec.bc_right = bc,
    }
    // The imposed trace and the stored initial profile may disagree by the
    // noise level at t = 0; start from the imposed value to stay consistent.
    let node = match side {
        Side::Left => 0,
        Side::Right => spec.grid.n_nodes() - 1,
    };
    dirichlet_spec.initial[node] = data[0];
    solve_forward(&dirichlet_spec, cfg)
}

/// Backward second-order time difference of the field at the final time,
/// one value per node.
pub fn time_derivative_at_final(sol: &ForwardSolution) -> Vec<f64> {
    let m = sol.field.times.n_steps;
    assert!(m >= 2, "final-time derivative needs at least 2 time steps");
    let dt = sol.field.times.dt();
    let um = sol.field.step(m);
    let um1 = sol.field.step(m - 1);
    let um2 = sol.field.step(m - 2);
    um.iter()
        .zip(um1.iter())
        .zip(um2.iter())
        .map(|((&a, &b), &c)| (3.0 * a - 4.0 * b + c) / (2.0 * dt))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::CoefficientFn;
    use crate::grid::{SpatialGrid, TimeGrid};
    use crate::problem::{zero_source, BoundaryCondition, ProblemSpec};
    use crate::quadrature::trapezoid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn heat_spec(n_cells: usize, n_steps: usize, t_final: f64) -> ProblemSpec {
        let grid = SpatialGrid::new(0.0, 1.0, n_cells).unwrap();
        let times = TimeGrid::new(t_final, n_steps).unwrap();
        ProblemSpec {
            initial: grid.nodes().iter().map(|x| (PI * x).sin()).collect(),
            grid,
            times,
            coefficient: CoefficientFn::constant(1.0, -0.5, 1.5).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::dirichlet(|_| 0.0),
            bc_right: BoundaryCondition::dirichlet(|_| 0.0),
        }
    }

    #[test]
    fn separable_heat_solution() {
        let spec = heat_spec(100, 100, 0.1);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let got = sol.field.at(50, 100);
        let exact = (-PI * PI * 0.1).exp(); // u(1/2, 0.1)
        assert!((got - exact).abs() < 2e-4, "{got} vs {exact}");
    }

    #[test]
    fn constant_steady_state_under_matched_impedance() {
        let c = 0.75;
        let gamma = 2.0;
        let grid = SpatialGrid::new(0.0, 1.0, 16).unwrap();
        let times = TimeGrid::new(1.0, 20).unwrap();
        let spec = ProblemSpec {
            initial: vec![c; grid.n_nodes()],
            grid,
            times,
            coefficient: CoefficientFn::from_fn(0.0, 1.0, 11, |u| 1.0 + u).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::impedance(gamma, move |_| gamma * c),
            bc_right: BoundaryCondition::impedance(gamma, move |_| gamma * c),
        };
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        for n in 0..=20 {
            for i in 0..sol.field.grid.n_nodes() {
                assert!((sol.field.at(i, n) - c).abs() < 1e-12);
            }
            // Imposed flux relation holds exactly for the stored trace.
            assert!((sol.flux_left[n] - (gamma * c - gamma * c)).abs() < 1e-12);
        }
    }

    // Manufactured solution u(x,t) = e^{-t} (1 + x^2) / 2 under a(u) = 1 + u:
    //   u_t   = -u
    //   u_x   = e^{-t} x,  u_xx = e^{-t}
    //   (a(u) u_x)_x = u_x^2 + (1 + u) u_xx
    //   r     = -e^{-t}(3 + x^2)/2 - e^{-2t}(1 + 3 x^2)/2
    fn mms_u(x: f64, t: f64) -> f64 {
        (-t).exp() * (1.0 + x * x) / 2.0
    }

    fn mms_r(x: f64, t: f64) -> f64 {
        -(-t).exp() * (3.0 + x * x) / 2.0 - (-2.0 * t).exp() * (1.0 + 3.0 * x * x) / 2.0
    }

    pub(crate) fn mms_spec(n_cells: usize, n_steps: usize, t_final: f64) -> ProblemSpec {
        let grid = SpatialGrid::new(0.0, 1.0, n_cells).unwrap();
        let times = TimeGrid::new(t_final, n_steps).unwrap();
        ProblemSpec {
            initial: grid.nodes().iter().map(|&x| mms_u(x, 0.0)).collect(),
            grid,
            times,
            coefficient: CoefficientFn::from_fn(-0.1, 1.2, 801, |u| 1.0 + u).unwrap(),
            source: Arc::new(|x, t, _| mms_r(x, t)),
            // Left end: a(u) ∂ν u + γ u with ∂ν u = -u_x(0) = 0,
            // so b = γ u(0, t).
            bc_left: BoundaryCondition::impedance(1.0, |t: f64| (-t).exp() / 2.0),
            bc_right: BoundaryCondition::dirichlet(|t: f64| (-t).exp()),
        }
    }

    fn mms_sup_error(n_cells: usize, n_steps: usize) -> f64 {
        let spec = mms_spec(n_cells, n_steps, 1.0);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let xs = spec.grid.nodes();
        sol.field
            .final_profile()
            .iter()
            .zip(xs.iter())
            .map(|(&u, &x)| (u - mms_u(x, 1.0)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_second_order() {
        let e0 = mms_sup_error(20, 20);
        let e1 = mms_sup_error(40, 40);
        let e2 = mms_sup_error(80, 80);
        let p01 = (e0 / e1).log2();
        let p12 = (e1 / e2).log2();
        assert!(p01 > 1.9 && p12 > 1.9, "orders {p01:.3}, {p12:.3} ({e0:.2e}, {e1:.2e}, {e2:.2e})");
    }

    #[test]
    fn mass_is_conserved_with_insulated_ends() {
        let grid = SpatialGrid::new(0.0, 1.0, 50).unwrap();
        let times = TimeGrid::new(0.5, 100).unwrap();
        let spec = ProblemSpec {
            initial: grid.nodes().iter().map(|x| 1.0 + (PI * x).sin()).collect(),
            grid,
            times,
            coefficient: CoefficientFn::from_fn(0.5, 2.5, 41, |u| 1.0 + 0.5 * u * u).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::insulated(),
            bc_right: BoundaryCondition::insulated(),
        };
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let xs = spec.grid.nodes();
        let m0 = trapezoid(&xs, sol.field.step(0));
        for n in 1..=100 {
            let m = trapezoid(&xs, sol.field.step(n));
            assert!((m - m0).abs() < n as f64 * 1e-9, "step {n}: drift {}", (m - m0).abs());
        }
    }

    #[test]
    fn maximum_principle_with_dirichlet_data() {
        let grid = SpatialGrid::new(0.0, 1.0, 40).unwrap();
        let times = TimeGrid::new(0.5, 40).unwrap();
        let spec = ProblemSpec {
            initial: grid.nodes().iter().map(|x| (PI * x).sin()).collect(),
            grid,
            times,
            coefficient: CoefficientFn::from_fn(-0.1, 1.1, 41, |u| 1.0 + u).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::dirichlet(|_| 0.0),
            bc_right: BoundaryCondition::dirichlet(|_| 0.0),
        };
        let cfg = SolverConfig::default();
        let sol = solve_forward(&spec, &cfg).unwrap();
        let tol = 10.0 * cfg.picard_tol;
        let (lo, hi) = sol.field.value_range();
        assert!(lo >= 0.0 - tol && hi <= 1.0 + tol, "range [{lo}, {hi}]");
    }

    #[test]
    fn picard_counts_are_logged_and_cap_raises() {
        let spec = mms_spec(30, 10, 1.0);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        assert_eq!(sol.picard_counts.len(), 10);
        assert!(sol.picard_counts.iter().all(|&c| c >= 1));

        let tight = SolverConfig { picard_max_iter: 1, picard_tol: 1e-14, theta: 0.5 };
        match solve_forward(&spec, &tight) {
            Err(Error::NonConvergence { step, residual }) => {
                assert_eq!(step, 0);
                assert!(residual > 1e-14);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn final_time_derivative_examples() {
        // Steady state: zero everywhere.
        let c = 1.3;
        let grid = SpatialGrid::new(0.0, 1.0, 10).unwrap();
        let times = TimeGrid::new(1.0, 8).unwrap();
        let spec = ProblemSpec {
            initial: vec![c; grid.n_nodes()],
            grid,
            times,
            coefficient: CoefficientFn::constant(1.0, 0.0, 2.0).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::insulated(),
            bc_right: BoundaryCondition::insulated(),
        };
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        for d in time_derivative_at_final(&sol) {
            assert!(d.abs() < 1e-10);
        }

        // Manufactured: D_t u(x, T) = -e^{-T} (1 + x^2) / 2.
        let spec = mms_spec(80, 80, 1.0);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let dts = time_derivative_at_final(&sol);
        for (i, d) in dts.iter().enumerate() {
            let x = spec.grid.node(i);
            assert!((d + mms_u(x, 1.0)).abs() < 2e-3, "node {i}: {d}");
        }

        // Separable heat solution: D_t u(1/2, T) = -pi^2 e^{-pi^2 T}.
        let spec = heat_spec(200, 400, 0.1);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let dts = time_derivative_at_final(&sol);
        let exact = -PI * PI * (-PI * PI * 0.1).exp();
        assert!((dts[100] - exact).abs() < 5e-3, "{} vs {exact}", dts[100]);
    }

    fn trace_record_from(sol: &ForwardSolution, x0: f64) -> crate::data::ObservationRecord {
        let node = sol.field.grid.node_index_of(x0).unwrap();
        let values = sol.field.trace_at_node(node);
        let coords = sol.field.times.times();
        crate::data::ObservationRecord {
            kind: crate::data::ObservationKind::TimeTrace { x0 },
            raw: coords.iter().zip(values.iter()).map(|(&c, &v)| (c, v)).collect(),
            noise_level: 0.0,
            filter_weight: 0.0,
            d1: crate::data::derivative(&values, sol.field.times.dt()),
            d2: None,
            monotone: values.windows(2).all(|w| w[1] > w[0]),
            coords,
            smoothed: values,
        }
    }

    #[test]
    fn dirichlet_resolve_reproduces_the_original_solution() {
        let spec = mms_spec(60, 60, 1.0);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let record = trace_record_from(&sol, 1.0);
        let re = solve_forward_dirichlet_from_trace(&spec, &record, &SolverConfig::default())
            .unwrap();
        let mut worst = 0.0f64;
        for n in 0..=60 {
            for i in 0..=60 {
                worst = worst.max((re.field.at(i, n) - sol.field.at(i, n)).abs());
            }
        }
        assert!(worst < 1e-8, "re-imposed trace drifted by {worst}");
    }

    #[test]
    fn dirichlet_resolve_steady_linear_profile() {
        // u = x is steady under a = 1 with flux -1 on the left and a trace
        // pinned at u(1) = 1; the outward derivative at x = 1 is exactly 1.
        let grid = SpatialGrid::new(0.0, 1.0, 20).unwrap();
        let times = TimeGrid::new(1.0, 10).unwrap();
        let spec = ProblemSpec {
            initial: grid.nodes(),
            grid,
            times,
            coefficient: CoefficientFn::constant(1.0, -0.5, 1.5).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::impedance(0.0, |_| -1.0),
            bc_right: BoundaryCondition::dirichlet(|_| 1.0),
        };
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let record = trace_record_from(&sol, 1.0);
        let re = solve_forward_dirichlet_from_trace(&spec, &record, &SolverConfig::default())
            .unwrap();
        let dnu = re.normal_derivative(Side::Right);
        for d in dnu {
            assert!((d - 1.0).abs() < 1e-9, "{d}");
        }
    }

    #[test]
    fn dirichlet_resolve_matches_manufactured_normal_derivative() {
        let spec = mms_spec(80, 80, 1.0);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let record = trace_record_from(&sol, 1.0);
        let re = solve_forward_dirichlet_from_trace(&spec, &record, &SolverConfig::default())
            .unwrap();
        let dnu = re.normal_derivative(Side::Right);
        for (n, d) in dnu.iter().enumerate() {
            let t = spec.times.time(n);
            // ∂ν u(1, t) = u_x(1, t) = e^{-t}
            assert!((d - (-t).exp()).abs() < 2e-3, "step {n}: {d} vs {}", (-t).exp());
        }
    }

    #[test]
    fn trace_mismatch_and_bad_sensor_errors() {
        let spec = mms_spec(20, 20, 1.0);
        let sol = solve_forward(&spec, &SolverConfig::default()).unwrap();
        let mut record = trace_record_from(&sol, 1.0);
        record.kind = crate::data::ObservationKind::TimeTrace { x0: 0.5 };
        assert!(matches!(
            solve_forward_dirichlet_from_trace(&spec, &record, &SolverConfig::default()),
            Err(Error::BadSensor { .. })
        ));

        let mut record = trace_record_from(&sol, 1.0);
        record.coords.truncate(10);
        record.smoothed.truncate(10);
        assert!(matches!(
            solve_forward_dirichlet_from_trace(&spec, &record, &SolverConfig::default()),
            Err(Error::TraceMismatch { .. })
        ));
    }

    #[test]
    fn blow_up_is_reported() {
        // A source that feeds back explosively drives the iterate past f64.
        let grid = SpatialGrid::new(0.0, 1.0, 10).unwrap();
        let times = TimeGrid::new(10.0, 2).unwrap();
        let spec = ProblemSpec {
            initial: vec![1.0; grid.n_nodes()],
            grid,
            times,
            coefficient: CoefficientFn::constant(1.0, 0.0, 2.0).unwrap(),
            source: Arc::new(|_, _, u: f64| (u * u).exp()),
            bc_left: BoundaryCondition::insulated(),
            bc_right: BoundaryCondition::insulated(),
        };
        match solve_forward(&spec, &SolverConfig::default()) {
            Err(Error::BlowUp { .. }) | Err(Error::NonConvergence { .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
