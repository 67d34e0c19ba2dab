//! Shared reference experiments for the integration suites: a smooth truth
//! coefficient and a mollified-step truth, each driven so the observed data
//! spans the full range of the solution.

#![allow(dead_code)]

use std::sync::Arc;

use diffid::*;

/// Working grid of the reference experiments.
pub const WORKING_CELLS: usize = 400;
pub const WORKING_STEPS: usize = 400;
/// Refinement factor of the data-generation grid over the working grid.
pub const FINE_FACTOR: usize = 3;
/// Sparse sample counts.
pub const N_SAMPLES: usize = 40;

/// Smooth reference truth.
pub fn smooth_truth(u: f64) -> f64 {
    1.0 + u * u / 2.0 + 0.3 * (2.0 * u).sin()
}

/// Mollified piecewise-constant truth: levels 1.0 / 2.0 / 1.2 with quintic
/// smoothstep transitions centered at 0.7 and 1.4 (full width 0.25).
pub fn step_truth(u: f64) -> f64 {
    1.0 + 1.0 * smoothstep((u - 0.7) / 0.25 + 0.5) - 0.8 * smoothstep((u - 1.4) / 0.25 + 0.5)
}

/// Centers of the two transitions of [`step_truth`].
pub const STEP_TRANSITIONS: [f64; 2] = [0.7, 1.4];

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (6.0 * s * s - 15.0 * s + 10.0)
}

/// Truth coefficient densely sampled for data generation.
pub fn truth_coefficient(truth: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> CoefficientFn {
    CoefficientFn::from_fn(lo, hi, 801, truth)
        .unwrap()
        .with_floor(1e-6)
}

/// Final-time reference experiment: ramped influx on the left, cold
/// Dirichlet right end, so the snapshot decreases strictly in x and attains
/// the full solution range.
pub struct FinalTimeExperiment {
    pub problem: FinalTimeProblem,
    pub fine_solution: ForwardSolution,
}

/// Left-end influx ramp of the flux-driven final-time experiment.
pub const FT_RAMP: f64 = 7.0;
/// Left-end wall-temperature ramp of the Dirichlet-driven variant.
pub const FT_WALL_RAMP: f64 = 2.0;

/// How the hot end of the final-time experiment is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtDrive {
    /// Impedance end with a linear influx ramp; the anchor comes from the
    /// boundary flux.
    FluxRamp,
    /// Dirichlet end with a linear wall-temperature ramp; the anchor is
    /// supplied.
    WallRamp,
}

fn ft_template(cells: usize, steps: usize, drive: FtDrive) -> ProblemTemplate {
    let grid = SpatialGrid::new(0.0, 1.0, cells).unwrap();
    let times = TimeGrid::new(1.0, steps).unwrap();
    ProblemTemplate {
        initial: vec![0.0; grid.n_nodes()],
        grid,
        times,
        source: zero_source(),
        bc_left: match drive {
            FtDrive::FluxRamp => BoundaryCondition::impedance(0.0, |t: f64| FT_RAMP * t),
            FtDrive::WallRamp => BoundaryCondition::dirichlet(|t: f64| FT_WALL_RAMP * t),
        },
        bc_right: BoundaryCondition::dirichlet(|_| 0.0),
    }
}

pub fn final_time_experiment(
    truth: &dyn Fn(f64) -> f64,
    noise_percent: f64,
    seed: u64,
) -> FinalTimeExperiment {
    final_time_experiment_full(
        truth,
        noise_percent,
        seed,
        WORKING_CELLS,
        WORKING_STEPS,
        N_SAMPLES,
        FtDrive::FluxRamp,
    )
}

/// Dense noise-free variant used by the stationarity and contractivity
/// oracles: every fine node is a sample.
pub fn final_time_experiment_dense(
    truth: &dyn Fn(f64) -> f64,
    cells: usize,
    steps: usize,
) -> FinalTimeExperiment {
    final_time_experiment_full(
        truth,
        0.0,
        0,
        cells,
        steps,
        cells * FINE_FACTOR + 1,
        FtDrive::FluxRamp,
    )
}

/// Dirichlet-driven protocol variant (both walls pinned, hot wall ramped).
pub fn final_time_experiment_wall(
    truth: &dyn Fn(f64) -> f64,
    noise_percent: f64,
    seed: u64,
) -> FinalTimeExperiment {
    final_time_experiment_full(
        truth,
        noise_percent,
        seed,
        WORKING_CELLS,
        WORKING_STEPS,
        N_SAMPLES,
        FtDrive::WallRamp,
    )
}

pub fn final_time_experiment_full(
    truth: &dyn Fn(f64) -> f64,
    noise_percent: f64,
    seed: u64,
    cells: usize,
    steps: usize,
    n_samples: usize,
    drive: FtDrive,
) -> FinalTimeExperiment {
    let cfg = SolverConfig::default();
    let fine = ft_template(cells * FINE_FACTOR, steps * FINE_FACTOR, drive);
    let spec = fine.with_coefficient(truth_coefficient(truth, -0.3, 3.2));
    let fine_solution = solve_forward(&spec, &cfg).expect("reference solve");

    let samples = sample_observation(&fine_solution, ObservationKind::FinalTime, n_samples)
        .expect("sampling");
    let noisy = add_noise(&samples, noise_percent, seed);
    let working = ft_template(cells, steps, drive);
    let record = ObservationRecord::from_samples(
        ObservationKind::FinalTime,
        noisy,
        &working.grid.nodes(),
        noise_percent,
        NoiseModel::UniformRelative,
        FilterWeight::Auto,
    )
    .expect("record");

    // Exterior values: the truth continued constantly past the realized J.
    let (j_lo, j_hi) = record.value_range();
    let anchor = match drive {
        FtDrive::FluxRamp => AnchorMode::BoundaryFlux,
        // The hot wall sits at x = 0, so the anchor value is the truth at
        // the top of the data range.
        FtDrive::WallRamp => AnchorMode::Value(truth(record.smoothed[0])),
    };
    let problem = FinalTimeProblem::new(
        working,
        record,
        anchor,
        truth(j_lo),
        truth(j_hi),
        ReconOptions::default(),
    )
    .expect("problem");
    let (lo, hi) = fine_solution.field.value_range();
    let problem = problem.with_solution_range(RangeInterval { u_lo: lo, u_hi: hi });
    FinalTimeExperiment { problem, fine_solution }
}

/// Time-trace reference experiment: insulated left end, ramped influx at
/// the sensor end x0 = 1, so the trace increases strictly and attains the
/// full solution range.
pub struct TimeTraceExperiment {
    pub problem: TimeTraceProblem,
    pub fine_solution: ForwardSolution,
}

/// Sensor-end influx ramp of the time-trace experiment: rises linearly over
/// the first fifth of the window, then holds, so the late phase is
/// quasi-steady.
pub const TT_RAMP: f64 = 5.0;
pub const TT_T_FINAL: f64 = 1.0;

fn tt_flux(t: f64, t_final: f64, ramp: f64) -> f64 {
    let t_rise = 0.2 * t_final;
    ramp * (t / t_rise).min(1.0)
}

fn tt_template(cells: usize, steps: usize, t_final: f64, ramp: f64) -> ProblemTemplate {
    let grid = SpatialGrid::new(0.0, 1.0, cells).unwrap();
    let times = TimeGrid::new(t_final, steps).unwrap();
    ProblemTemplate {
        initial: vec![0.0; grid.n_nodes()],
        grid,
        times,
        source: zero_source(),
        bc_left: BoundaryCondition::insulated(),
        bc_right: BoundaryCondition::impedance(0.0, move |t: f64| tt_flux(t, t_final, ramp)),
    }
}

pub fn time_trace_experiment(
    truth: &dyn Fn(f64) -> f64,
    noise_percent: f64,
    seed: u64,
) -> TimeTraceExperiment {
    time_trace_experiment_full(
        truth,
        noise_percent,
        seed,
        WORKING_CELLS,
        WORKING_STEPS,
        TT_T_FINAL,
        TT_RAMP,
        N_SAMPLES,
    )
}

/// Dense noise-free variant used by the stationarity oracles.
pub fn time_trace_experiment_dense(
    truth: &dyn Fn(f64) -> f64,
    cells: usize,
    steps: usize,
) -> TimeTraceExperiment {
    time_trace_experiment_full(
        truth,
        0.0,
        0,
        cells,
        steps,
        TT_T_FINAL,
        TT_RAMP,
        steps * FINE_FACTOR + 1,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn time_trace_experiment_full(
    truth: &dyn Fn(f64) -> f64,
    noise_percent: f64,
    seed: u64,
    cells: usize,
    steps: usize,
    t_final: f64,
    ramp: f64,
    n_samples: usize,
) -> TimeTraceExperiment {
    let cfg = SolverConfig::default();
    let fine = tt_template(cells * FINE_FACTOR, steps * FINE_FACTOR, t_final, ramp);
    let spec = fine.with_coefficient(truth_coefficient(truth, -0.3, 3.2));
    let fine_solution = solve_forward(&spec, &cfg).expect("reference solve");

    let samples =
        sample_observation(&fine_solution, ObservationKind::TimeTrace { x0: 1.0 }, n_samples)
            .expect("sampling");
    let noisy = add_noise(&samples, noise_percent, seed);
    let working = tt_template(cells, steps, t_final, ramp);
    let record = ObservationRecord::from_samples(
        ObservationKind::TimeTrace { x0: 1.0 },
        noisy,
        &working.times.times(),
        noise_percent,
        NoiseModel::UniformRelative,
        FilterWeight::Auto,
    )
    .expect("record");

    let (j_lo, j_hi) = record.value_range();
    let problem = TimeTraceProblem::new(
        working,
        record,
        Some(truth(j_lo)),
        truth(j_lo),
        truth(j_hi),
        ReconOptions::default(),
    )
    .expect("problem");
    let (lo, hi) = fine_solution.field.value_range();
    let problem = problem.with_solution_range(RangeInterval { u_lo: lo, u_hi: hi });
    TimeTraceExperiment { problem, fine_solution }
}

/// Initial iterate used throughout: a ≡ 1 on the data interval.
pub fn unit_initial(j: (f64, f64)) -> CoefficientFn {
    CoefficientFn::constant(1.0, j.0, j.1).unwrap()
}
