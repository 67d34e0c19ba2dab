//! Knot-based representation of the solution-dependent coefficient `a(u)`.
//!
//! The coefficient is interpolated by a shape-preserving C¹ cubic on uniform
//! knots over an interval `J = [j_lo, j_hi]`, held at prescribed constant
//! values outside `J` (with an optional cosine taper between the last knot
//! value and the exterior value), and clamped from below so the forward
//! problem stays uniformly parabolic.

use crate::error::{Error, Result};
use crate::interp::pchip_slopes;

/// Default positivity clamp.
pub const DEFAULT_FLOOR: f64 = 1e-3;

/// Default knot count for reconstructed coefficients.
pub const DEFAULT_KNOTS: usize = 101;

#[derive(Debug, Clone)]
pub struct CoefficientFn {
    j_lo: f64,
    j_hi: f64,
    knot_values: Vec<f64>,
    slopes: Vec<f64>,
    a_le: f64,
    a_ri: f64,
    blend_width: f64,
    a_floor: f64,
}

impl CoefficientFn {
    /// Build from values at uniform knots on `[j_lo, j_hi]`. Exterior values
    /// default to the end knots; blend width defaults to zero; the positivity
    /// floor defaults to [`DEFAULT_FLOOR`].
    pub fn from_knot_values(j_lo: f64, j_hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(j_lo < j_hi) {
            return Err(Error::BadInput(format!(
                "coefficient interval needs j_lo < j_hi, got [{j_lo}, {j_hi}]"
            )));
        }
        if values.len() < 2 {
            return Err(Error::BadInput("coefficient needs at least 2 knots".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadInput("coefficient knot values must be finite".into()));
        }
        let knots: Vec<f64> = knot_positions(j_lo, j_hi, values.len());
        let slopes = pchip_slopes(&knots, &values);
        let a_le = values[0];
        let a_ri = *values.last().unwrap();
        Ok(Self {
            j_lo,
            j_hi,
            knot_values: values,
            slopes,
            a_le,
            a_ri,
            blend_width: 0.0,
            a_floor: DEFAULT_FLOOR,
        })
    }

    /// Sample a closed-form coefficient at `n_knots` uniform knots.
    pub fn from_fn(
        j_lo: f64,
        j_hi: f64,
        n_knots: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = knot_positions(j_lo, j_hi, n_knots).into_iter().map(f).collect();
        Self::from_knot_values(j_lo, j_hi, values)
    }

    /// The constant coefficient `a ≡ value` on `[j_lo, j_hi]`.
    pub fn constant(value: f64, j_lo: f64, j_hi: f64) -> Result<Self> {
        Self::from_knot_values(j_lo, j_hi, vec![value, value])
    }

    pub fn with_exterior(mut self, a_le: f64, a_ri: f64) -> Self {
        self.a_le = a_le;
        self.a_ri = a_ri;
        self
    }

    pub fn with_blend_width(mut self, width: f64) -> Self {
        assert!(width >= 0.0, "blend width must be nonnegative");
        self.blend_width = width;
        self
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        assert!(floor > 0.0, "positivity floor must be positive");
        self.a_floor = floor;
        self
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.j_lo, self.j_hi)
    }

    pub fn floor(&self) -> f64 {
        self.a_floor
    }

    pub fn n_knots(&self) -> usize {
        self.knot_values.len()
    }

    pub fn knot_spacing(&self) -> f64 {
        (self.j_hi - self.j_lo) / (self.n_knots() - 1) as f64
    }

    pub fn knot_positions(&self) -> Vec<f64> {
        knot_positions(self.j_lo, self.j_hi, self.n_knots())
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    /// Fraction of knots whose raw value sits at or below the positivity
    /// floor; 1.0 flags a degenerate (fully clamped) reconstruction.
    pub fn clamped_fraction(&self) -> f64 {
        let hit = self.knot_values.iter().filter(|&&v| v <= self.a_floor).count();
        hit as f64 / self.n_knots() as f64
    }

    /// Knot segment containing `tau` plus the local coordinate within it.
    fn segment(&self, tau: f64) -> (usize, f64, f64) {
        let h = self.knot_spacing();
        let s = (tau - self.j_lo) / h;
        let i = (s.floor() as isize).clamp(0, self.n_knots() as isize - 2) as usize;
        let t = s - i as f64;
        (i, t, h)
    }

    fn raw_value(&self, tau: f64) -> f64 {
        let w = self.blend_width;
        if tau < self.j_lo {
            let inner = self.knot_values[0];
            return blend_exterior(self.a_le, inner, self.j_lo - tau, w);
        }
        if tau > self.j_hi {
            let inner = *self.knot_values.last().unwrap();
            return blend_exterior(self.a_ri, inner, tau - self.j_hi, w);
        }
        let (i, t, h) = self.segment(tau);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.knot_values[i] * h00
            + h * self.slopes[i] * h10
            + self.knot_values[i + 1] * h01
            + h * self.slopes[i + 1] * h11
    }

    fn raw_derivative(&self, tau: f64) -> f64 {
        let w = self.blend_width;
        if tau < self.j_lo {
            let inner = self.knot_values[0];
            return -blend_exterior_deriv(self.a_le, inner, self.j_lo - tau, w);
        }
        if tau > self.j_hi {
            let inner = *self.knot_values.last().unwrap();
            return blend_exterior_deriv(self.a_ri, inner, tau - self.j_hi, w);
        }
        let (i, t, h) = self.segment(tau);
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        self.knot_values[i] * dh00
            + self.slopes[i] * dh10
            + self.knot_values[i + 1] * dh01
            + self.slopes[i + 1] * dh11
    }

    /// Coefficient value at `tau`, clamped to the positivity floor.
    pub fn value(&self, tau: f64) -> f64 {
        self.raw_value(tau).max(self.a_floor)
    }

    /// Derivative of the clamped coefficient at `tau` (zero wherever the
    /// clamp is active).
    pub fn derivative(&self, tau: f64) -> f64 {
        if self.raw_value(tau) < self.a_floor {
            0.0
        } else {
            self.raw_derivative(tau)
        }
    }

    /// Sup distance to `other` sampled at `n` points across `J` (union of
    /// knot intervals when the intervals differ).
    pub fn sup_distance(&self, other: &CoefficientFn, n: usize) -> f64 {
        let lo = self.j_lo.min(other.j_lo);
        let hi = self.j_hi.max(other.j_hi);
        sample_positions(lo, hi, n)
            .map(|tau| (self.value(tau) - other.value(tau)).abs())
            .fold(0.0, f64::max)
    }
}

fn knot_positions(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let d = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * d).collect()
}

fn sample_positions(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let d = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| lo + i as f64 * d)
}

/// Value at distance `dist` outside the knot interval: pure exterior beyond
/// the taper, cosine blend from the boundary knot value to the exterior
/// value inside it.
fn blend_exterior(exterior: f64, inner: f64, dist: f64, width: f64) -> f64 {
    if width == 0.0 || dist >= width {
        return exterior;
    }
    // Weight 1 at the interval edge, 0 at the outer edge of the taper.
    let s = 1.0 - dist / width;
    let w = 0.5 * (1.0 - (std::f64::consts::PI * s).cos());
    exterior + (inner - exterior) * w
}

/// d/d(dist) of [`blend_exterior`].
fn blend_exterior_deriv(exterior: f64, inner: f64, dist: f64, width: f64) -> f64 {
    if width == 0.0 || dist >= width {
        return 0.0;
    }
    let s = 1.0 - dist / width;
    let dw = 0.5 * std::f64::consts::PI * (std::f64::consts::PI * s).sin() * (-1.0 / width);
    (inner - exterior) * dw
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn constant_coefficient_evaluates_to_itself() {
        let c = CoefficientFn::constant(1.0, 0.0, 1.0).unwrap();
        assert_eq!(c.value(0.5), 1.0);
        assert_eq!(c.derivative(0.5), 0.0);
        assert_eq!(c.value(-3.0), 1.0);
        assert_eq!(c.derivative(7.0), 0.0);
    }

    #[test]
    fn exterior_value_beyond_blend() {
        let c = CoefficientFn::constant(1.0, 0.0, 1.0)
            .unwrap()
            .with_exterior(2.0, 3.0)
            .with_blend_width(0.1);
        assert_eq!(c.value(-0.2), 2.0); // j_lo - 2*blend_width
        assert_eq!(c.value(1.2), 3.0);
        // Junction continuity at the interval edges.
        assert!((c.value(-1e-12) - 1.0).abs() < 1e-9);
        assert!((c.value(1.0 + 1e-12) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_sampled_on_knots_is_exact_at_knots() {
        let c = CoefficientFn::from_fn(0.0, 1.0, 21, |u| 1.0 + u * u).unwrap();
        // tau = 0.3 is a knot of the 21-point grid.
        assert!((c.value(0.3) - 1.09).abs() < 1e-12);
        // Between knots the interpolation error is O(h^3) at worst.
        assert!((c.value(0.325) - (1.0 + 0.325f64 * 0.325)).abs() < 1e-4);
    }

    #[test]
    fn derivative_of_linear_samples() {
        let c = CoefficientFn::from_fn(0.0, 1.0, 11, |u| 1.0 + u).unwrap();
        assert!((c.derivative(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clamp_enforces_floor() {
        let c = CoefficientFn::from_fn(0.0, 1.0, 11, |u| u - 0.5).unwrap();
        for i in 0..=100 {
            let tau = i as f64 / 100.0;
            assert!(c.value(tau) >= c.floor());
        }
        // Clamped region has zero derivative.
        assert_eq!(c.derivative(0.1), 0.0);
        assert!(c.clamped_fraction() > 0.4);
    }

    #[test]
    fn roundtrip_reproduces_samples_at_knots() {
        let f = |u: f64| 1.3 + 0.5 * (2.0 * u).sin();
        let c = CoefficientFn::from_fn(-0.5, 1.5, 31, f).unwrap();
        for tau in c.knot_positions() {
            assert!((c.value(tau) - f(tau)).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let c = CoefficientFn::from_fn(0.0, 2.0, 41, |u| 1.0 + u * u / 2.0 + 0.3 * (2.0 * u).sin())
            .unwrap()
            .with_exterior(1.0, 3.0)
            .with_blend_width(0.05);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        let dk = c.knot_spacing();
        for _ in 0..100 {
            let tau: f64 = rng.random_range(-0.3..2.3);
            let fd = (c.value(tau + h) - c.value(tau - h)) / (2.0 * h);
            let tol = 1e-6 + 5.0 * dk * dk;
            assert!(
                (fd - c.derivative(tau)).abs() < tol,
                "tau = {tau}: fd {fd} vs {}",
                c.derivative(tau)
            );
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(CoefficientFn::from_knot_values(1.0, 0.0, vec![1.0, 1.0]).is_err());
        assert!(CoefficientFn::from_knot_values(0.0, 1.0, vec![1.0]).is_err());
        assert!(CoefficientFn::from_knot_values(0.0, 1.0, vec![1.0, f64::NAN]).is_err());
    }
}
