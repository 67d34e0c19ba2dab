//! Exact solution formula for the first-order linear equation in the value
//! variable, `a'(τ) + p(τ) a(τ) = q(τ)`, discretized by trapezoid
//! quadrature of the integrating factor.
//!
//! Every reconstruction scheme that projects the equation onto an
//! observation manifold reduces to this solve on the (possibly nonuniform)
//! grid of observed values.

use crate::quadrature::cumulative_trapezoid;

/// Solve `a' + p a = q` along the value nodes `tau` (strictly monotone,
/// increasing or decreasing) with `a(tau[0]) = a0`:
///
/// `a(τ) = e^{-I(τ)} (a0 + ∫ q e^{I} dσ)` with `I(τ) = ∫ p dσ`, both
/// integrals accumulated from `tau[0]` by the trapezoid rule.
pub fn solve_linear_value_ode(tau: &[f64], p: &[f64], q: &[f64], a0: f64) -> Vec<f64> {
    let n = tau.len();
    assert!(n >= 2);
    assert_eq!(p.len(), n);
    assert_eq!(q.len(), n);

    let big_i = cumulative_trapezoid(tau, p);
    // Guard the exponent so a pathological p cannot overflow to inf * 0.
    let forcing: Vec<f64> = q
        .iter()
        .zip(big_i.iter())
        .map(|(&qi, &ii)| qi * ii.clamp(-700.0, 700.0).exp())
        .collect();
    let big_j = cumulative_trapezoid(tau, &forcing);
    big_i
        .iter()
        .zip(big_j.iter())
        .map(|(&ii, &ji)| (-ii.clamp(-700.0, 700.0)).exp() * (a0 + ji))
        .collect()
}
