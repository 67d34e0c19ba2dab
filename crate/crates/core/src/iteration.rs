//! Iteration bookkeeping shared by the reconstruction schemes: per-iterate
//! coefficient snapshots, error norms against a reference, increments and
//! the stopping rule.

use std::time::Duration;

use crate::coefficient::CoefficientFn;
use crate::quadrature::trapezoid;

/// Number of sample points used when measuring coefficient norms over `J`.
pub const NORM_SAMPLES: usize = 801;

/// Shared knobs of the reconstruction schemes.
#[derive(Debug, Clone)]
pub struct ReconOptions {
    /// Knot count of reconstructed coefficients on `J`.
    pub knots: usize,
    /// Positivity clamp applied to every iterate.
    pub a_floor: f64,
    /// Taper width between `J` and the exterior values; `None` resolves to
    /// two knot spacings.
    pub blend_width: Option<f64>,
    /// Floor on gradient magnitudes the schemes divide by.
    pub kappa: f64,
    /// Floor on boundary fluxes the schemes divide by.
    pub flux_floor: f64,
    /// Tolerated range-condition violation as a fraction of `|J|`; noisy
    /// data shrinks the observed range by up to the noise level.
    pub range_slack: f64,
}

impl Default for ReconOptions {
    fn default() -> Self {
        Self {
            knots: crate::coefficient::DEFAULT_KNOTS,
            a_floor: crate::coefficient::DEFAULT_FLOOR,
            blend_width: None,
            kappa: 1e-8,
            flux_floor: 1e-8,
            range_slack: 0.1,
        }
    }
}

impl ReconOptions {
    pub fn resolve_blend_width(&self, j_width: f64) -> f64 {
        self.blend_width
            .unwrap_or(2.0 * j_width / (self.knots.max(2) - 1) as f64)
    }
}

/// Iteration caps and stopping tolerance.
#[derive(Debug, Clone)]
pub struct IterationSettings {
    /// Hard cap on the number of updates.
    pub n_iters: usize,
    /// Sup-norm increment below which the iteration stops; `None` resolves
    /// to `1e-6 · ‖a_0‖_∞`.
    pub stop_tol: Option<f64>,
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self { n_iters: 15, stop_tol: None }
    }
}

impl IterationSettings {
    pub fn resolve_stop_tol(&self, a0: &CoefficientFn) -> f64 {
        self.stop_tol.unwrap_or_else(|| {
            let sup = a0
                .knot_values()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
                .max(a0.floor());
            1e-6 * sup
        })
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Increment dropped below the stopping tolerance after this many
    /// updates.
    Converged { iterations: usize },
    /// The iteration cap was reached first.
    MaxIterations,
}

/// Error norms of one iterate against the reference coefficient.
#[derive(Debug, Clone, Copy)]
pub struct ErrorNorms {
    pub l2: f64,
    pub sup: f64,
}

/// History of one reconstruction run: `a_0 .. a_K`, norms against the
/// reference (when one was supplied), increments and wall time.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub coefficients: Vec<CoefficientFn>,
    /// One entry per coefficient when a reference was given, empty otherwise.
    pub errors: Vec<ErrorNorms>,
    /// `‖a_{k+1} - a_k‖_∞`, one entry per update.
    pub increments: Vec<f64>,
    pub wall: Vec<Duration>,
    pub termination: Termination,
}

impl IterationTrace {
    pub fn final_coefficient(&self) -> &CoefficientFn {
        self.coefficients.last().expect("trace holds at least a_0")
    }

    pub fn final_errors(&self) -> Option<ErrorNorms> {
        self.errors.last().copied()
    }
}

/// Sup and L² distance between a coefficient and a reference function,
/// sampled across `J`.
pub fn coefficient_errors(a: &CoefficientFn, reference: &dyn Fn(f64) -> f64) -> ErrorNorms {
    let (lo, hi) = a.interval();
    let n = NORM_SAMPLES;
    let taus: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let mut sup = 0.0f64;
    let sq: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let d = a.value(tau) - reference(tau);
            sup = sup.max(d.abs());
            d * d
        })
        .collect();
    ErrorNorms { l2: trapezoid(&taus, &sq).max(0.0).sqrt(), sup }
}

/// L² norm of a reference function over the coefficient's interval, for
/// relative errors.
pub fn reference_l2_norm(a: &CoefficientFn, reference: &dyn Fn(f64) -> f64) -> f64 {
    let (lo, hi) = a.interval();
    let n = NORM_SAMPLES;
    let taus: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let sq: Vec<f64> = taus.iter().map(|&tau| reference(tau) * reference(tau)).collect();
    trapezoid(&taus, &sq).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_known_gap() {
        let a = CoefficientFn::constant(2.0, 0.0, 1.0).unwrap();
        let e = coefficient_errors(&a, &|_| 1.0);
        assert!((e.sup - 1.0).abs() < 1e-12);
        assert!((e.l2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn default_stop_tol_scales_with_a0() {
        let a = CoefficientFn::constant(2.0, 0.0, 1.0).unwrap();
        let s = IterationSettings::default();
        assert!((s.resolve_stop_tol(&a) - 2e-6).abs() < 1e-18);
    }
}
