//! Composite trapezoid rules on (possibly nonuniform) grids.

/// Trapezoid integral of `f` sampled on nodes `x`.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    assert_eq!(x.len(), f.len());
    let mut s = 0.0;
    for i in 1..x.len() {
        s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    }
    s
}

/// Cumulative trapezoid integral: `out[i] = ∫_{x_0}^{x_i} f`.
pub fn cumulative_trapezoid(x: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), f.len());
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    }
    out
}
