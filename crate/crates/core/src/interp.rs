//! Interpolation kernels: shape-preserving cubic (for monotone traces and
//! coefficient knots), natural cubic splines (for spatial profiles) and
//! piecewise-linear resampling.

use crate::linalg::solve_tridiagonal;

/// Locate the segment index `i` with `xs[i] <= x <= xs[i+1]`, clamping to the
/// first/last segment outside the span. `xs` must be strictly increasing.
pub fn segment_index(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    debug_assert!(n >= 2);
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[n - 1] {
        return n - 2;
    }
    // Binary search for the last node <= x.
    let mut lo = 0usize;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if xs[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Shape-preserving (Fritsch–Carlson) tangents for cubic Hermite
/// interpolation of `(xs, ys)`. Monotone data yields a monotone interpolant.
pub fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert_eq!(ys.len(), n);
    assert!(n >= 2);
    if n == 2 {
        let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            // Weighted harmonic mean; equals the plain harmonic mean on
            // uniform spacing and never overshoots.
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

/// One-sided boundary tangent with the usual monotonicity limiting.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        m = 0.0;
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        m = 3.0 * d0;
    }
    m
}

/// Evaluate the cubic Hermite interpolant defined by nodes, values and
/// tangents at `x` (constant-slope extension outside the span).
pub fn hermite_eval(xs: &[f64], ys: &[f64], slopes: &[f64], x: f64) -> f64 {
    let i = segment_index(xs, x);
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    ys[i] * h00 + h * slopes[i] * h10 + ys[i + 1] * h01 + h * slopes[i + 1] * h11
}

/// Derivative of [`hermite_eval`] with respect to `x`.
pub fn hermite_deriv(xs: &[f64], ys: &[f64], slopes: &[f64], x: f64) -> f64 {
    let i = segment_index(xs, x);
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    ys[i] * dh00 + slopes[i] * dh10 + ys[i + 1] * dh01 + slopes[i + 1] * dh11
}

/// Monotone cubic resampling of `(xs, ys)` onto `targets`.
pub fn pchip_resample(xs: &[f64], ys: &[f64], targets: &[f64]) -> Vec<f64> {
    let m = pchip_slopes(xs, ys);
    targets.iter().map(|&x| hermite_eval(xs, ys, &m, x)).collect()
}

/// Natural cubic spline through `(xs, ys)` evaluated at `targets`
/// (second derivative zero at both ends; linear extension outside the span).
pub fn natural_spline_resample(xs: &[f64], ys: &[f64], targets: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert_eq!(ys.len(), n);
    assert!(n >= 3, "natural spline needs at least 3 samples");
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();

    // Interior moment equations; natural ends pin M_0 = M_{n-1} = 0.
    let m_interior = if n > 2 {
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut lower = vec![0.0; k.saturating_sub(1)];
        let mut upper = vec![0.0; k.saturating_sub(1)];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1;
            diag[j] = 2.0 * (h[i - 1] + h[i]);
            rhs[j] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
            if j > 0 {
                lower[j - 1] = h[i - 1];
            }
            if j + 1 < k {
                upper[j] = h[i];
            }
        }
        if k == 1 {
            vec![rhs[0] / diag[0]]
        } else {
            solve_tridiagonal(&lower, &diag, &upper, &rhs)
        }
    } else {
        Vec::new()
    };
    let mut moments = vec![0.0; n];
    moments[1..n - 1].copy_from_slice(&m_interior);

    targets
        .iter()
        .map(|&x| {
            if x <= xs[0] {
                // Linear extension with the end slope.
                let s = (ys[1] - ys[0]) / h[0] - h[0] * moments[1] / 6.0;
                return ys[0] + s * (x - xs[0]);
            }
            if x >= xs[n - 1] {
                let s = (ys[n - 1] - ys[n - 2]) / h[n - 2] + h[n - 2] * moments[n - 2] / 6.0;
                return ys[n - 1] + s * (x - xs[n - 1]);
            }
            let i = segment_index(xs, x);
            let a = (xs[i + 1] - x) / h[i];
            let b = (x - xs[i]) / h[i];
            a * ys[i]
                + b * ys[i + 1]
                + ((a * a * a - a) * moments[i] + (b * b * b - b) * moments[i + 1]) * h[i] * h[i]
                    / 6.0
        })
        .collect()
}

/// Piecewise-linear resampling (clamped at the ends).
pub fn linear_resample(xs: &[f64], ys: &[f64], targets: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    targets
        .iter()
        .map(|&x| {
            if x <= xs[0] {
                return ys[0];
            }
            if x >= xs[xs.len() - 1] {
                return ys[ys.len() - 1];
            }
            let i = segment_index(xs, x);
            let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
            ys[i] + t * (ys[i + 1] - ys[i])
        })
        .collect()
}
