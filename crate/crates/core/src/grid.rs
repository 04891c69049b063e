//! Uniform grids and tensor-product point sets for centers, collocation, and
//! metric evaluation.

/// `n` evenly spaced points covering `[lo, hi]` inclusively. A single point
/// lands at the interval midpoint. The endpoints are exactly `lo` and `hi`,
/// not rounded accumulations of the step.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1, "linspace needs at least one point");
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    out[n - 1] = hi;
    out
}

/// `n` evenly spaced points strictly inside `(lo, hi)`: the uniform partition
/// into `n + 1` cells with a point at each internal cell boundary.
pub fn interior_linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1, "interior_linspace needs at least one point");
    let step = (hi - lo) / (n + 1) as f64;
    (0..n).map(|i| lo + step * (i + 1) as f64).collect()
}

/// Tensor product of per-axis coordinate lists, row-major (the last axis
/// varies fastest). Each output entry is one point of dimension `axes.len()`.
pub fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: usize = axes.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let dim = axes.len();
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        out.push(idx.iter().zip(axes).map(|(&i, ax)| ax[i]).collect());
        for k in (0..dim).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

/// Squared Euclidean distance between two points of equal dimension.
pub fn sq_dist(x: &[f64], c: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), c.len());
    x.iter().zip(c).map(|(&a, &b)| (a - b) * (a - b)).sum()
}
