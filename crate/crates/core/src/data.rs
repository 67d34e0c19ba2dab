//! Observation pipeline: sample a reference solve at a few points, corrupt
//! with noise, interpolate to the working grid, smooth with a first- or
//! second-difference Tikhonov filter, and differentiate.
//!
//! Final-time snapshots `g(x) = u(x, T)` get the second-difference (H²)
//! filter; boundary time traces `h(t) = u(x0, t)` get the first-difference
//! (H¹) filter and a strict-monotonicity check so they can be inverted.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forward::ForwardSolution;
use crate::interp::{natural_spline_resample, pchip_resample, segment_index};
use crate::linalg::{solve_pentadiagonal_spd, solve_tridiagonal};

/// Minimum increase between consecutive trace values for the trace to count
/// as strictly monotone.
pub const MONOTONE_EPS: f64 = 1e-14;

/// What was observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationKind {
    /// Snapshot `u(·, T)` over the spatial domain.
    FinalTime,
    /// Trace `u(x0, ·)` at a fixed sensor.
    TimeTrace { x0: f64 },
}

/// How noise perturbs the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    /// `v ← v (1 + (level/100) ξ)`, `ξ` i.i.d. uniform on [-1, 1].
    UniformRelative,
    /// `v ← v + (level/100) rms(v) η`, `η` i.i.d. standard normal.
    GaussianRelative,
}

/// Smoothing weight selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterWeight {
    /// Discrepancy principle: grow β until the residual RMS matches the
    /// noise RMS estimate.
    Auto,
    Fixed(f64),
}

/// Closed interval of solution values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeInterval {
    pub u_lo: f64,
    pub u_hi: f64,
}

impl RangeInterval {
    pub fn new(u_lo: f64, u_hi: f64) -> Result<Self> {
        if !(u_lo < u_hi) {
            return Err(Error::BadInput(format!(
                "range interval needs u_lo < u_hi, got [{u_lo}, {u_hi}]"
            )));
        }
        Ok(Self { u_lo, u_hi })
    }

    pub fn width(&self) -> f64 {
        self.u_hi - self.u_lo
    }
}

/// Sampled, noise-corrupted, smoothed observation on the working grid.
#[derive(Debug, Clone)]
pub struct ObservationRecord {
    pub kind: ObservationKind,
    /// Sparse `(coordinate, value)` samples after noise.
    pub raw: Vec<(f64, f64)>,
    /// Relative noise level in percent.
    pub noise_level: f64,
    /// Resolved smoothing weight β.
    pub filter_weight: f64,
    /// Working-grid coordinates (x for snapshots, t for traces).
    pub coords: Vec<f64>,
    /// Smoothed values on the working grid.
    pub smoothed: Vec<f64>,
    /// First derivative of the smoothed values.
    pub d1: Vec<f64>,
    /// Second derivative, populated for final-time records.
    pub d2: Option<Vec<f64>>,
    /// Whether a trace is strictly monotone (always true for snapshots).
    pub monotone: bool,
}

impl ObservationRecord {
    /// Run the full pipeline: interpolate the sparse samples onto
    /// `working_coords`, resolve the filter weight, smooth, differentiate.
    pub fn from_samples(
        kind: ObservationKind,
        raw: Vec<(f64, f64)>,
        working_coords: &[f64],
        noise_level: f64,
        noise_model: NoiseModel,
        filter: FilterWeight,
    ) -> Result<Self> {
        if raw.len() < 4 {
            return Err(Error::BadInput(format!(
                "observation needs at least 4 samples, got {}",
                raw.len()
            )));
        }
        if working_coords.len() < 4 {
            return Err(Error::BadInput("working grid needs at least 4 nodes".into()));
        }
        for w in raw.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::BadInput(
                    "sample coordinates must be strictly increasing".into(),
                ));
            }
        }
        let xs: Vec<f64> = raw.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = raw.iter().map(|s| s.1).collect();

        // Interpolate the sparse samples up to the working grid first, then
        // filter on the full grid.
        let interpolated = match kind {
            ObservationKind::FinalTime => natural_spline_resample(&xs, &ys, working_coords),
            ObservationKind::TimeTrace { .. } => pchip_resample(&xs, &ys, working_coords),
        };

        let delta = working_coords[1] - working_coords[0];
        let target = noise_rms_estimate(&interpolated, noise_level, noise_model);
        let beta = match filter {
            FilterWeight::Fixed(b) => {
                if b < 0.0 {
                    return Err(Error::BadInput("filter weight must be nonnegative".into()));
                }
                b
            }
            FilterWeight::Auto => match kind {
                ObservationKind::FinalTime => {
                    discrepancy_weight(&interpolated, delta, target, FilterOrder::Second)
                }
                ObservationKind::TimeTrace { .. } => {
                    discrepancy_weight(&interpolated, delta, target, FilterOrder::First)
                }
            },
        };
        let smoothed = match kind {
            ObservationKind::FinalTime => smooth_h2(&interpolated, delta, beta),
            ObservationKind::TimeTrace { .. } => smooth_h1(&interpolated, delta, beta),
        };

        let d1 = derivative(&smoothed, delta);
        let d2 = match kind {
            ObservationKind::FinalTime => Some(second_derivative(&smoothed, delta)),
            ObservationKind::TimeTrace { .. } => None,
        };
        let monotone = match kind {
            ObservationKind::FinalTime => true,
            ObservationKind::TimeTrace { .. } => {
                smoothed.windows(2).all(|w| w[1] - w[0] >= MONOTONE_EPS)
            }
        };

        Ok(Self {
            kind,
            raw,
            noise_level,
            filter_weight: beta,
            coords: working_coords.to_vec(),
            smoothed,
            d1,
            d2,
            monotone,
        })
    }

    /// Extremes of the smoothed data; this is the interval `J` on which the
    /// coefficient can be identified.
    pub fn value_range(&self) -> (f64, f64) {
        let lo = self.smoothed.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.smoothed.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Uniformly indexed subsamples of the final profile or of a sensor trace.
pub fn sample_observation(
    sol: &ForwardSolution,
    kind: ObservationKind,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_samples < 4 {
        return Err(Error::BadInput("need at least 4 samples".into()));
    }
    let (coords, values): (Vec<f64>, Vec<f64>) = match kind {
        ObservationKind::FinalTime => {
            (sol.field.grid.nodes(), sol.field.final_profile().to_vec())
        }
        ObservationKind::TimeTrace { x0 } => {
            let node = sol
                .field
                .grid
                .node_index_of(x0)
                .ok_or(Error::BadSensor { x0 })?;
            (sol.field.times.times(), sol.field.trace_at_node(node))
        }
    };
    if n_samples > coords.len() {
        return Err(Error::BadInput(format!(
            "asked for {n_samples} samples from {} grid values",
            coords.len()
        )));
    }
    let last = coords.len() - 1;
    Ok((0..n_samples)
        .map(|j| {
            let idx = ((j as f64 * last as f64) / (n_samples - 1) as f64).round() as usize;
            (coords[idx], values[idx])
        })
        .collect())
}

/// Relative multiplicative noise, uniform on [-1, 1], deterministic in the
/// seed.
pub fn add_noise(samples: &[(f64, f64)], level_percent: f64, seed: u64) -> Vec<(f64, f64)> {
    add_noise_with(samples, level_percent, seed, NoiseModel::UniformRelative)
}

/// Noise with an explicit model.
pub fn add_noise_with(
    samples: &[(f64, f64)],
    level_percent: f64,
    seed: u64,
    model: NoiseModel,
) -> Vec<(f64, f64)> {
    assert!(level_percent >= 0.0, "noise level must be nonnegative");
    if level_percent == 0.0 {
        return samples.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model {
        NoiseModel::UniformRelative => samples
            .iter()
            .map(|&(c, v)| {
                let xi: f64 = rng.random_range(-1.0..=1.0);
                (c, v * (1.0 + level_percent / 100.0 * xi))
            })
            .collect(),
        NoiseModel::GaussianRelative => {
            let rms = rms(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
            samples
                .iter()
                .map(|&(c, v)| {
                    let eta: f64 = rng.sample(rand_distr::StandardNormal);
                    (c, v + level_percent / 100.0 * rms * eta)
                })
                .collect()
        }
    }
}

fn rms(values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

fn noise_rms_estimate(values: &[f64], level_percent: f64, model: NoiseModel) -> f64 {
    let scale = rms(values) * level_percent / 100.0;
    match model {
        // Uniform on [-1, 1] has standard deviation 1/sqrt(3).
        NoiseModel::UniformRelative => scale / 3f64.sqrt(),
        NoiseModel::GaussianRelative => scale,
    }
}

/// Penalty order of the smoothing filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOrder {
    First,
    Second,
}

/// Minimizer of `Σ (v - y)² Δ + β Σ ((v_{j+1} - v_j)/Δ)² Δ`, i.e. the
/// solution of `(I + β D₁ᵀD₁) v = y` with free ends. Constants pass through
/// unchanged.
pub fn smooth_h1(values: &[f64], delta: f64, beta: f64) -> Vec<f64> {
    assert!(beta >= 0.0 && delta > 0.0);
    let n = values.len();
    assert!(n >= 2);
    if beta == 0.0 {
        return values.to_vec();
    }
    let s = beta / (delta * delta);
    let mut diag = vec![1.0; n];
    let mut off = vec![0.0; n - 1];
    for r in 0..n - 1 {
        diag[r] += s;
        diag[r + 1] += s;
        off[r] -= s;
    }
    solve_tridiagonal(&off, &diag, &off, values)
}

/// Second-difference analogue of [`smooth_h1`]: `(I + β D₂ᵀD₂) v = y` with
/// free ends. Affine data passes through unchanged.
pub fn smooth_h2(values: &[f64], delta: f64, beta: f64) -> Vec<f64> {
    assert!(beta >= 0.0 && delta > 0.0);
    let n = values.len();
    assert!(n >= 3);
    if beta == 0.0 {
        return values.to_vec();
    }
    let s = beta / delta.powi(4);
    let mut diag = vec![1.0; n];
    let mut off1 = vec![0.0; n - 1];
    let mut off2 = vec![0.0; n - 2];
    let stencil = [1.0, -2.0, 1.0];
    for r in 0..n - 2 {
        for i in 0..3 {
            diag[r + i] += s * stencil[i] * stencil[i];
        }
        off1[r] += s * stencil[0] * stencil[1];
        off1[r + 1] += s * stencil[1] * stencil[2];
        off2[r] += s * stencil[0] * stencil[2];
    }
    solve_pentadiagonal_spd(&diag, &off1, &off2, values)
}

/// Discrepancy-principle weight: the smallest β (up to bisection tolerance)
/// whose residual RMS reaches the noise RMS estimate. Returns 0 for
/// noise-free data.
pub fn discrepancy_weight(values: &[f64], delta: f64, target_rms: f64, order: FilterOrder) -> f64 {
    if target_rms <= 0.0 {
        return 0.0;
    }
    let residual_rms = |beta: f64| -> f64 {
        let v = match order {
            FilterOrder::First => smooth_h1(values, delta, beta),
            FilterOrder::Second => smooth_h2(values, delta, beta),
        };
        rms(&v.iter().zip(values.iter()).map(|(a, b)| a - b).collect::<Vec<_>>())
    };
    let mut hi = 1e-12;
    let mut grow = 0;
    while residual_rms(hi) < target_rms && grow < 100 {
        hi *= 4.0;
        grow += 1;
    }
    if grow == 100 {
        // Penalty null space already fits the data to better than the noise
        // estimate; saturate.
        return hi;
    }
    let mut lo = hi / 4.0;
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if residual_rms(mid) < target_rms {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Second-order first derivative on a uniform grid: central in the
/// interior, one-sided three-point formulas at the ends.
pub fn derivative(values: &[f64], delta: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3);
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * delta);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * delta);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * delta);
    out
}

/// Second-order second derivative on a uniform grid: central in the
/// interior, one-sided four-point formulas at the ends.
pub fn second_derivative(values: &[f64], delta: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4);
    let d2 = delta * delta;
    let mut out = vec![0.0; n];
    out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / d2;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / d2;
    }
    out[n - 1] =
        (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / d2;
    out
}

/// Piecewise-linear inverse of a strictly increasing trace.
#[derive(Debug, Clone)]
pub struct MonotoneInverse {
    values: Vec<f64>,
    times: Vec<f64>,
}

impl MonotoneInverse {
    /// The time at which the trace attains `sigma` (clamped to the trace
    /// span). Exact at the trace nodes.
    pub fn eval(&self, sigma: f64) -> f64 {
        let n = self.values.len();
        if sigma <= self.values[0] {
            return self.times[0];
        }
        if sigma >= self.values[n - 1] {
            return self.times[n - 1];
        }
        let i = segment_index(&self.values, sigma);
        let w = (sigma - self.values[i]) / (self.values[i + 1] - self.values[i]);
        self.times[i] + w * (self.times[i + 1] - self.times[i])
    }

    /// Span of trace values.
    pub fn domain(&self) -> (f64, f64) {
        (self.values[0], *self.values.last().unwrap())
    }
}

/// Build the inverse of a strictly monotone smoothed trace; reports the
/// first violating index otherwise.
pub fn invert_trace(record: &ObservationRecord) -> Result<MonotoneInverse> {
    match record.kind {
        ObservationKind::TimeTrace { .. } => {}
        ObservationKind::FinalTime => {
            return Err(Error::BadInput("only time traces can be inverted".into()))
        }
    }
    for (i, w) in record.smoothed.windows(2).enumerate() {
        if !(w[1] - w[0] >= MONOTONE_EPS) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    Ok(MonotoneInverse { values: record.smoothed.clone(), times: record.coords.clone() })
}

/// Containment check of the observed value range against the solution
/// range; the margin is the smallest containment distance (negative when
/// violated).
pub fn check_range(record: &ObservationRecord, sol_range: &RangeInterval) -> (bool, f64) {
    let (data_lo, data_hi) = record.value_range();
    let margin = (sol_range.u_lo - data_lo).min(data_hi - sol_range.u_hi);
    (margin >= 0.0, margin)
}

/// Read `(coordinate, value)` samples from a two-column CSV with a header
/// row.
pub fn read_observation_csv(path: &std::path::Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 || line.trim().is_empty() {
            continue; // header
        }
        let mut parts = line.split(',');
        let c = parts.next().unwrap_or("").trim();
        let v = parts.next().ok_or(Error::Csv {
            line: idx + 1,
            reason: "expected two comma-separated columns".into(),
        })?;
        let coord: f64 = c.parse().map_err(|_| Error::Csv {
            line: idx + 1,
            reason: format!("bad coordinate {c:?}"),
        })?;
        let value: f64 = v.trim().parse().map_err(|_| Error::Csv {
            line: idx + 1,
            reason: format!("bad value {:?}", v.trim()),
        })?;
        out.push((coord, value));
    }
    Ok(out)
}
