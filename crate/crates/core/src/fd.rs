//! Central finite-difference helpers used as the oracle for every analytic
//! derivative in the crate.
//!
//! First differences use the step convention `h = scale * max(1, |x|)` so the
//! relative step never collapses for large arguments (the shifted-domain
//! benchmarks evaluate near x = 100). The second-difference operator stencil
//! uses the fixed step [`OPERATOR_STEP`] instead; see its docs.

/// Default relative step for first-order central differences of analytically
/// computed quantities. Truncation and roundoff are both far below the 1e-6
/// comparison tolerances used by the derivative tests.
pub const DEFAULT_STEP: f64 = 1e-6;

/// Absolute step used when applying a differential operator to an exact
/// solution via second-order central differences. Larger than
/// [`DEFAULT_STEP`] because the second-difference quotient divides roundoff by
/// h², and deliberately not scaled by the argument magnitude: the benchmark
/// solutions oscillate at fixed wavelengths even on domains shifted to
/// x ≈ 100, where a scaled step would dominate the truncation error.
pub const OPERATOR_STEP: f64 = 1e-4;

/// Central difference step for the argument `x`: `scale * max(1, |x|)`.
pub fn step(x: f64, scale: f64) -> f64 {
    scale * x.abs().max(1.0)
}

/// First derivative of `f` at `x` by central differences with the default step.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    central_diff_with_step(f, x, step(x, DEFAULT_STEP))
}

/// First derivative of `f` at `x` with an explicit step `h`.
pub fn central_diff_with_step(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Second derivative of `f` at `x` by the three-point stencil with the fixed
/// step [`OPERATOR_STEP`].
pub fn second_central_diff(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    second_central_diff_with_step(f, x, OPERATOR_STEP)
}

/// Second derivative of `f` at `x` with an explicit step `h`.
pub fn second_central_diff_with_step(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Gradient of a scalar function of a parameter vector by central differences,
/// one coordinate at a time.
pub fn grad_fd(mut f: impl FnMut(&[f64]) -> f64, theta: &[f64]) -> Vec<f64> {
    let mut work = theta.to_vec();
    let mut out = vec![0.0; theta.len()];
    for i in 0..theta.len() {
        let h = step(theta[i], DEFAULT_STEP);
        let orig = work[i];
        work[i] = orig + h;
        let fp = f(&work);
        work[i] = orig - h;
        let fm = f(&work);
        work[i] = orig;
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

/// Relative error between two values with the denominator floored at 1, so
/// values that are both tiny compare as equal.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Largest [`rel_err`] over two equally long slices.
pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| rel_err(x, y))
        .fold(0.0, f64::max)
}
