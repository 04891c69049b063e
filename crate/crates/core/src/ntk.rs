//! Neural tangent kernel diagnostics: exact Gram kernels from Jacobian
//! blocks, normalization, spectral decomposition, per-mode decay predictions,
//! kernel drift, and the closed-form kernel of a Gaussian radial basis
//! network in one dimension.
//!
//! All kernels here are raw Gram products `J Jᵀ`; loss weights enter the
//! training dynamics but not these matrices, so callers scale where needed.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use nalgebra::{DMatrix, SymmetricEigen};

/// Matrices at or above this order skip the dense eigendecomposition in
/// [`drift`] and use power iteration instead.
const DENSE_EIG_LIMIT: usize = 512;

/// Eigenvalues this far below zero, relative to the largest one, indicate a
/// non-Gram matrix rather than round-off and are rejected.
const NEGATIVE_EIG_REL_TOL: f64 = 1e-8;

/// Full kernel of the stacked residual rows: governing rows first, boundary
/// rows after, giving the block layout
/// `[[K_gg, K_gb], [K_bg, K_bb]]`.
pub fn kernel(j_g: &Mat, j_b: &Mat) -> Result<Mat> {
    if j_g.cols != j_b.cols {
        return Err(Error::DimensionMismatch(format!(
            "Jacobian blocks span different parameter counts: {} vs {}",
            j_g.cols, j_b.cols
        )));
    }
    let mut data = Vec::with_capacity((j_g.rows + j_b.rows) * j_g.cols);
    data.extend_from_slice(&j_g.data);
    data.extend_from_slice(&j_b.data);
    let stacked = Mat { rows: j_g.rows + j_b.rows, cols: j_g.cols, data };
    Ok(stacked.mul_bt(&stacked))
}

/// Scale a kernel to unit diagonal: `K̂ᵢⱼ = Kᵢⱼ / sqrt(Kᵢᵢ Kⱼⱼ)`.
///
/// Fails if any diagonal entry is not strictly positive, which would mean a
/// residual row with an identically zero Jacobian.
pub fn normalize(k: &Mat) -> Result<Mat> {
    if k.rows != k.cols {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {}x{}, expected square",
            k.rows, k.cols
        )));
    }
    let inv_sqrt: Vec<f64> = (0..k.rows)
        .map(|i| {
            let d = k.get(i, i);
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(Error::DegenerateKernel(format!(
                    "diagonal entry {i} is {d}, cannot normalize"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let mut out = Mat::zeros(k.rows, k.cols);
    for i in 0..k.rows {
        for j in 0..k.cols {
            out.set(i, j, k.get(i, j) * inv_sqrt[i] * inv_sqrt[j]);
        }
    }
    Ok(out)
}

/// Eigendecomposition of a symmetric kernel, `K = Qᵀ Λ Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectral {
    /// Eigenvalues in descending order, round-off negatives clamped to zero.
    pub eigenvalues: Vec<f64>,
    /// Rows are the matching orthonormal eigenvectors.
    pub q: Mat,
}

/// Decompose a symmetric positive semidefinite kernel.
///
/// Eigenvalues slightly below zero are round-off from the Gram product and
/// are clamped; strongly negative ones are rejected.
pub fn spectral(k: &Mat) -> Result<Spectral> {
    if k.rows != k.cols {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {}x{}, expected square",
            k.rows, k.cols
        )));
    }
    let n = k.rows;
    if n == 0 {
        return Ok(Spectral { eigenvalues: Vec::new(), q: Mat::zeros(0, 0) });
    }
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &k.data));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let lambda_max = eig.eigenvalues[order[0]].max(0.0);
    let floor = -NEGATIVE_EIG_REL_TOL * lambda_max.max(1e-300);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut q = Mat::zeros(n, n);
    for (row, &idx) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[idx];
        if lambda < floor {
            return Err(Error::DegenerateKernel(format!(
                "eigenvalue {lambda} is negative beyond round-off"
            )));
        }
        eigenvalues.push(lambda.max(0.0));
        for (j, &v) in eig.eigenvectors.column(idx).iter().enumerate() {
            q.set(row, j, v);
        }
    }
    Ok(Spectral { eigenvalues, q })
}

/// Per-mode residual amplitudes `exp(-λᵢ t) (Q r₀)ᵢ` predicted by linearized
/// gradient flow `dr/dt = -K r` from the initial residual `r₀`.
pub fn predicted_decay(s: &Spectral, r0: &[f64], t: f64) -> Result<Vec<f64>> {
    if r0.len() != s.q.rows {
        return Err(Error::DimensionMismatch(format!(
            "initial residual has {} entries, kernel has {} modes",
            r0.len(),
            s.q.rows
        )));
    }
    Ok(s.q
        .mul_vec(r0)
        .iter()
        .zip(&s.eigenvalues)
        .map(|(&a, &lambda)| (-lambda * t).exp() * a)
        .collect())
}

/// Spectral norm of `k_t - k_0`, measuring how far the kernel moved during
/// training.
///
/// Small differences get a dense eigendecomposition; larger ones fall back to
/// power iteration, which is cheap and deterministic.
pub fn drift(k_0: &Mat, k_t: &Mat) -> Result<f64> {
    if (k_0.rows, k_0.cols) != (k_t.rows, k_t.cols) || k_0.rows != k_0.cols {
        return Err(Error::DimensionMismatch(format!(
            "kernels are {}x{} and {}x{}, expected equal square shapes",
            k_0.rows, k_0.cols, k_t.rows, k_t.cols
        )));
    }
    let d = k_t.sub(k_0);
    let n = d.rows;
    if n == 0 {
        return Ok(0.0);
    }
    if n < DENSE_EIG_LIMIT {
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &d.data));
        return Ok(eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs())));
    }

    // Power iteration on the symmetric difference. The start vector varies
    // per index so a symmetric eigenspace cannot hide from it.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i % 7) as f64).collect();
    let norm = |x: &[f64]| x.iter().map(|&a| a * a).sum::<f64>().sqrt();
    let s = norm(&v);
    v.iter_mut().for_each(|a| *a /= s);
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = d.mul_vec(&v);
        let next = norm(&w);
        if next == 0.0 {
            return Ok(0.0);
        }
        v = w.iter().map(|&a| a / next).collect();
        if (next - lambda).abs() <= 1e-10 * next.max(1e-300) {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}

/// How close a normalized kernel is to the identity: one minus the mean
/// absolute off-diagonal entry. Returns 1 for a 1x1 kernel.
pub fn diag_dominance(k_hat: &Mat) -> f64 {
    assert_eq!(k_hat.rows, k_hat.cols, "kernel must be square");
    let n = k_hat.rows;
    if n <= 1 {
        return 1.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += k_hat.get(i, j).abs();
            }
        }
    }
    1.0 - sum / (n * (n - 1)) as f64
}

/// Expected kernel of an untrained one-dimensional Gaussian radial basis
/// network, closed form.
///
/// Rows pair second-derivative responses `u''` at `g_pts` with value
/// responses `u` at `b_pts`, matching [`kernel`]'s block layout for a network
/// with trainable outer weights and shapes. The expectation is over the
/// standard normal outer weights; Monte Carlo averages of sampled kernels
/// converge to it.
pub fn theoretical_gaussian_kernel(
    g_pts: &[f64],
    b_pts: &[f64],
    centers: &[f64],
    b: f64,
) -> Result<Mat> {
    if centers.is_empty() {
        return Err(Error::InvalidInput("no centers".into()));
    }
    if b == 0.0 {
        return Err(Error::DegenerateShape);
    }
    let d = centers.len() as f64;
    let (b2, b4) = (b * b, b * b * b * b);
    // Polynomial factor of the shape-derivative of u'': d(u'')/db carries
    // -4b (2 b^4 eps^2 - 5 b^2 eps + 1) exp(-b^2 eps) per neuron.
    let poly = |eps: f64| 2.0 * b4 * eps * eps - 5.0 * b2 * eps + 1.0;

    let n_g = g_pts.len();
    let n = n_g + b_pts.len();
    let pts: Vec<f64> = g_pts.iter().chain(b_pts).copied().collect();
    let mut k = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (x, y) = (pts[i], pts[j]);
            let mut sum = 0.0;
            // With j >= i only three block cases occur; the lower triangle
            // fills in by symmetry of the Gram product.
            for &c in centers {
                let (ex, ey) = ((x - c) * (x - c), (y - c) * (y - c));
                let theta = (-b2 * (ex + ey)).exp();
                let term = if j < n_g {
                    4.0 * (b4 * (2.0 * b2 * ex - 1.0) * (2.0 * b2 * ey - 1.0)
                        + 4.0 * b2 * poly(ex) * poly(ey))
                } else if i < n_g {
                    2.0 * (b2 * (2.0 * b2 * ex - 1.0) + 4.0 * b2 * poly(ex) * ey)
                } else {
                    1.0 + 4.0 * b2 * ex * ey
                };
                sum += term * theta;
            }
            k.set(i, j, sum / d);
            k.set(j, i, sum / d);
        }
    }
    Ok(k)
}
