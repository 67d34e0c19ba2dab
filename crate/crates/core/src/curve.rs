//! Observation data along a parametrized curve: the snapshot values, their
//! gradient magnitude and Laplacian, and the projected equation's right-hand
//! side, all sampled at curve parameters σ ∈ [0, 1].
//!
//! In one dimension the curve is the domain itself; in higher dimensions the
//! samples are supplied by whoever evaluated the field on the curve.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CurveSamples {
    /// Curve parameters in [0, 1], strictly increasing.
    pub sigma: Vec<f64>,
    /// Snapshot values `g(x(σ))`; strictly monotone along the curve.
    pub g_vals: Vec<f64>,
    /// `|∇g(x(σ))|²`.
    pub grad_norm_sq: Vec<f64>,
    /// `Δg(x(σ))`.
    pub laplacian_g: Vec<f64>,
    /// `D_t u(x(σ), T) - r(x(σ), T)`.
    pub rhs_vals: Vec<f64>,
}

impl CurveSamples {
    /// Check the structural invariants against a gradient floor `kappa`.
    pub fn validate(&self, kappa: f64) -> Result<()> {
        let n = self.sigma.len();
        if n < 2 {
            return Err(Error::BadInput("curve needs at least 2 samples".into()));
        }
        for v in [&self.g_vals, &self.grad_norm_sq, &self.laplacian_g, &self.rhs_vals] {
            if v.len() != n {
                return Err(Error::BadInput("curve sample vectors must share a length".into()));
            }
        }
        if self.sigma[0] < -1e-12 || *self.sigma.last().unwrap() > 1.0 + 1e-12 {
            return Err(Error::BadInput("curve parameters must lie in [0, 1]".into()));
        }
        for (i, w) in self.sigma.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::BadInput(format!(
                    "curve parameters must increase strictly (index {})",
                    i + 1
                )));
            }
        }
        let increasing = self.g_vals[1] > self.g_vals[0];
        for (i, w) in self.g_vals.windows(2).enumerate() {
            let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
            if !ok {
                return Err(Error::NonMonotoneCurve { index: i + 1 });
            }
        }
        for (i, &g2) in self.grad_norm_sq.iter().enumerate() {
            if !(g2 >= kappa * kappa) {
                return Err(Error::DegenerateGradient {
                    axis: "sigma",
                    coordinate: self.sigma[i],
                    value: g2.max(0.0).sqrt(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_curve(n: usize) -> CurveSamples {
        let sigma: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        CurveSamples {
            g_vals: sigma.clone(),
            grad_norm_sq: vec![1.0; n],
            laplacian_g: vec![0.0; n],
            rhs_vals: vec![0.0; n],
            sigma,
        }
    }

    #[test]
    fn valid_curve_passes() {
        assert!(unit_curve(11).validate(1e-8).is_ok());
    }

    #[test]
    fn rejects_flat_values_and_small_gradients() {
        let mut c = unit_curve(5);
        c.g_vals[3] = c.g_vals[2];
        assert!(matches!(c.validate(1e-8), Err(Error::NonMonotoneCurve { index: 3 })));

        let mut c = unit_curve(5);
        c.grad_norm_sq[2] = 1e-20;
        assert!(matches!(c.validate(1e-8), Err(Error::DegenerateGradient { .. })));
    }
}
