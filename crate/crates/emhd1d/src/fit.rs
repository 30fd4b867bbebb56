//! Small least-squares helpers shared by the measurement labs.

/// Ordinary least-squares line `y ~ intercept + slope * x`.
///
/// Returns `(intercept, slope)`. Requires at least two distinct abscissae;
/// degenerate input yields a horizontal line through the mean.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return (my, 0.0);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Root of the least-squares line through `(xs, ys)`, if the slope is
/// meaningfully nonzero.
pub fn line_root(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (intercept, slope) = linear_fit(xs, ys);
    if slope.abs() < 1e-300 || !slope.is_finite() {
        None
    } else {
        Some(-intercept / slope)
    }
}

/// Centred finite-difference derivative of a sampled curve `y(x)`.
///
/// Interior points use the three-point centred stencil (exact for the
/// nonuniform spacing of the sample abscissae); the ends use one-sided
/// differences. Needs at least two samples.
pub fn centred_derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    assert!(n >= 2, "need at least two samples");
    let mut out = vec![0.0; n];
    out[0] = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    out[n - 1] = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    for i in 1..n - 1 {
        // Nonuniform centred difference, second-order accurate.
        let hl = xs[i] - xs[i - 1];
        let hr = xs[i + 1] - xs[i];
        out[i] = (hl * hl * ys[i + 1] - hr * hr * ys[i - 1]
            + (hr * hr - hl * hl) * ys[i])
            / (hl * hr * (hl + hr));
    }
    out
}

/// Parabolic refinement of a discrete argmax.
///
/// Given three samples `(y_minus, y_center, y_plus)` at spacing `h` around a
/// discrete maximum, returns the offset of the interpolated vertex (clamped
/// to `[-h, h]`) and the interpolated peak value.
pub fn parabolic_peak(y_minus: f64, y_center: f64, y_plus: f64, h: f64) -> (f64, f64) {
    let denom = y_minus - 2.0 * y_center + y_plus;
    if denom >= 0.0 || denom.abs() < 1e-300 {
        return (0.0, y_center);
    }
    let offset = (0.5 * h * (y_minus - y_plus) / denom).clamp(-h, h);
    let value = y_center - 0.25 * (y_minus - y_plus) * offset / h;
    (offset, value)
}
