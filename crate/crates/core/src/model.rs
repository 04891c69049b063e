//! The two network families: the physics-informed radial basis network
//! (PIRBN) and a tanh feedforward baseline (FNN).
//!
//! Both expose the same evaluation record ([`NetworkDerivs`]): the output u,
//! its first and pure second spatial derivatives per axis, and exact parameter
//! Jacobian rows for all of those, computed in closed form (PIRBN) or by
//! nested tangent propagation with hand-derived tanh derivatives (FNN). No
//! numerical differencing is involved anywhere.

use crate::error::{Error, Result};
use crate::grid::{cartesian, linspace, sq_dist};
use crate::rbf::{rbf_derivs, RbfKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Gaussian activity cutoff: when b²·‖x − c‖² exceeds this, exp(−b²s) is below
/// 1.1e−20 and the neuron's contribution is dropped. This keeps residual
/// assembly proportional to the number of neurons whose impact interval covers
/// the point. Applied to the Gaussian family only; the other kernels decay too
/// slowly to truncate.
pub const GAUSSIAN_ACTIVITY_CUTOFF: f64 = 46.0;

/// Stream separator so random center draws do not consume the same RNG stream
/// as the outer-weight draws.
const CENTER_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Uniform tensor grid of neuron centers, one (range, count) pair per input
/// axis. Ranges deliberately extend past the PDE domain so that a few edge
/// neurons sit outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterGrid {
    pub ranges: Vec<(f64, f64)>,
    pub counts: Vec<usize>,
}

impl CenterGrid {
    pub fn new(ranges: Vec<(f64, f64)>, counts: Vec<usize>) -> Result<Self> {
        if ranges.len() != counts.len() || ranges.is_empty() {
            return Err(Error::InvalidInput(
                "center grid needs one (range, count) pair per axis".into(),
            ));
        }
        for &(lo, hi) in &ranges {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidInput(format!("bad center range [{lo}, {hi}]")));
            }
        }
        if counts.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput("center counts must be at least 1".into()));
        }
        Ok(CenterGrid { ranges, counts })
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().product()
    }

    /// All grid points, row-major over axes.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .ranges
            .iter()
            .zip(&self.counts)
            .map(|(&(lo, hi), &n)| linspace(lo, hi, n))
            .collect();
        cartesian(&axes)
    }
}

/// Single-hidden-layer radial basis network y = (1/√d)·Σᵢ aᵢ·𝒢ᵢ(x) with
/// trainable outer weights `a` and shape parameters `b`; the centers are fixed
/// at construction and never trained. The trainable parameter vector is
/// ordered (a₁..a_d, b₁..b_d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pirbn {
    pub kind: RbfKind,
    pub dim: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// d × dim, row-major.
    pub centers: Vec<f64>,
}

impl Pirbn {
    /// Width (neuron count).
    pub fn d(&self) -> usize {
        self.a.len()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }

    pub fn param_count(&self) -> usize {
        2 * self.d()
    }

    fn check(&self) -> Result<()> {
        if self.b.len() != self.a.len() || self.centers.len() != self.a.len() * self.dim {
            return Err(Error::DimensionMismatch(
                "a, b, and centers must agree on the neuron count".into(),
            ));
        }
        Ok(())
    }
}

/// Tanh feedforward network with a linear scalar output layer. `widths`
/// includes the input dimension first and the output width (always 1) last.
/// Weights of layer l form a widths[l+1] × widths[l] row-major block; the
/// trainable vector is layer-major: W₁, β₁, W₂, β₂, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fnn {
    pub widths: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Fnn {
    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn layer_count(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn param_count(&self) -> usize {
        (0..self.layer_count())
            .map(|l| self.widths[l + 1] * self.widths[l] + self.widths[l + 1])
            .sum()
    }
}

/// Output, spatial derivatives, and parameter Jacobian rows of one network at
/// one point.
///
/// Jacobian entries are guaranteed valid only at indices listed in `active`;
/// every other entry is zero. For a Gaussian PIRBN, `active` holds the (aᵢ, bᵢ)
/// indices of neurons within the activity cutoff; for everything else it is
/// all parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDerivs {
    pub u: f64,
    pub du_dx: Vec<f64>,
    pub d2u_dx2: Vec<f64>,
    pub du_dtheta: Vec<f64>,
    /// Per axis: row of ∂(∂u/∂xₖ)/∂θ.
    pub ddu_dx_dtheta: Vec<Vec<f64>>,
    /// Per axis: row of ∂(∂²u/∂xₖ²)/∂θ.
    pub dd2u_dx2_dtheta: Vec<Vec<f64>>,
    pub active: Vec<usize>,
}

impl NetworkDerivs {
    pub fn new(dim: usize, param_count: usize) -> Self {
        NetworkDerivs {
            u: 0.0,
            du_dx: vec![0.0; dim],
            d2u_dx2: vec![0.0; dim],
            du_dtheta: vec![0.0; param_count],
            ddu_dx_dtheta: vec![vec![0.0; param_count]; dim],
            dd2u_dx2_dtheta: vec![vec![0.0; param_count]; dim],
            active: Vec::new(),
        }
    }

    /// Zero the previously touched Jacobian entries and the spatial fields so
    /// the buffer can be refilled for a new point.
    fn reset(&mut self) {
        for &idx in &self.active {
            self.du_dtheta[idx] = 0.0;
            for row in &mut self.ddu_dx_dtheta {
                row[idx] = 0.0;
            }
            for row in &mut self.dd2u_dx2_dtheta {
                row[idx] = 0.0;
            }
        }
        self.active.clear();
        self.u = 0.0;
        self.du_dx.iter_mut().for_each(|v| *v = 0.0);
        self.d2u_dx2.iter_mut().for_each(|v| *v = 0.0);
    }
}

fn check_point(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "network expects dimension {dim}, point has {}",
            x.len()
        )));
    }
    for &v in x {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("coordinate is not finite: {v}")));
        }
    }
    Ok(())
}

fn neuron_skipped(kind: RbfKind, b: f64, s: f64) -> bool {
    kind == RbfKind::Gaussian && b * b * s > GAUSSIAN_ACTIVITY_CUTOFF
}

/// Network output y = (1/√d)·Σᵢ aᵢ·𝒢ᵢ(x).
pub fn pirbn_forward(net: &Pirbn, x: &[f64]) -> Result<f64> {
    net.check()?;
    check_point(net.dim, x)?;
    let scale = 1.0 / (net.d() as f64).sqrt();
    let mut sum = 0.0;
    for i in 0..net.d() {
        let s = sq_dist(x, net.center(i));
        if neuron_skipped(net.kind, net.b[i], s) {
            continue;
        }
        // Accumulated in the same association order as the derivative path so
        // the two agree bit for bit.
        sum += net.a[i] * scale * crate::rbf::rbf_eval(net.kind, net.b[i], s)?;
    }
    Ok(sum)
}

/// Full evaluation record of a PIRBN at `x`, written into a reusable buffer.
pub fn pirbn_derivs_into(net: &Pirbn, x: &[f64], out: &mut NetworkDerivs) -> Result<()> {
    net.check()?;
    check_point(net.dim, x)?;
    let d = net.d();
    let dim = net.dim;
    debug_assert_eq!(out.du_dtheta.len(), net.param_count());
    out.reset();
    let scale = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        let c = net.center(i);
        if neuron_skipped(net.kind, net.b[i], sq_dist(x, c)) {
            continue;
        }
        let rec = rbf_derivs(net.kind, net.b[i], x, c)?;
        let ai = net.a[i];
        out.u += ai * scale * rec.value;
        out.du_dtheta[i] = scale * rec.value;
        out.du_dtheta[d + i] = ai * scale * rec.d_db;
        for k in 0..dim {
            out.du_dx[k] += ai * scale * rec.d_dx[k];
            out.d2u_dx2[k] += ai * scale * rec.d2_dx2[k];
            out.ddu_dx_dtheta[k][i] = scale * rec.d_dx[k];
            out.ddu_dx_dtheta[k][d + i] = ai * scale * rec.d_db_of_dx[k];
            out.dd2u_dx2_dtheta[k][i] = scale * rec.d2_dx2[k];
            out.dd2u_dx2_dtheta[k][d + i] = ai * scale * rec.d_db_of_d2x2[k];
        }
        out.active.push(i);
        out.active.push(d + i);
    }
    Ok(())
}

/// Allocating convenience wrapper over [`pirbn_derivs_into`].
pub fn pirbn_derivs(net: &Pirbn, x: &[f64]) -> Result<NetworkDerivs> {
    let mut out = NetworkDerivs::new(net.dim, net.param_count());
    pirbn_derivs_into(net, x, &mut out)?;
    Ok(out)
}

/// Scratch space for one FNN evaluation; reused across points.
#[derive(Debug, Clone, Default)]
struct FnnScratch {
    /// Per layer boundary: activation values h (h[0] = x) and, per axis, their
    /// first and second derivatives in that input coordinate.
    h: Vec<Vec<f64>>,
    hk: Vec<Vec<Vec<f64>>>,
    hkk: Vec<Vec<Vec<f64>>>,
    /// Pre-activation tangents per layer, kept because the reverse pass needs
    /// z_k and z_kk explicitly (recovering them from h_k/p fails for
    /// saturated units where p underflows to zero).
    zk: Vec<Vec<Vec<f64>>>,
    zkk: Vec<Vec<Vec<f64>>>,
    /// Adjoint triple per layer boundary during a reverse pass.
    bar: Vec<Vec<f64>>,
    bar_k: Vec<Vec<f64>>,
    bar_kk: Vec<Vec<f64>>,
}

fn fnn_check(net: &Fnn) -> Result<()> {
    if net.widths.len() < 3 || *net.widths.last().unwrap() != 1 {
        return Err(Error::InvalidInput(
            "FNN needs at least one hidden layer and a scalar output".into(),
        ));
    }
    if net.weights.len() != net.layer_count() || net.biases.len() != net.layer_count() {
        return Err(Error::DimensionMismatch("FNN layer blocks do not match widths".into()));
    }
    for l in 0..net.layer_count() {
        if net.weights[l].len() != net.widths[l + 1] * net.widths[l]
            || net.biases[l].len() != net.widths[l + 1]
        {
            return Err(Error::DimensionMismatch(format!("FNN layer {l} has wrong shape")));
        }
    }
    Ok(())
}

/// Forward pass holding the (value, d/dxₖ, d²/dxₖ²) triple per unit, followed
/// by one reverse pass per output of interest to collect Jacobian rows.
///
/// The tanh chain uses t' = p = 1 − h², t'' = −2hp, t''' = 2p(2h² − p);
/// through an activation h = tanh(z) with forward tangents
/// h_k = p·z_k and h_kk = p·z_kk + t''·z_k², the reverse-mode adjoints are
///
///   z̄    = h̄·p + h̄_k·t''·z_k + h̄_kk·(t'''·z_k² + t''·z_kk)
///   z̄_k  = h̄_k·p + h̄_kk·2·t''·z_k
///   z̄_kk = h̄_kk·p
pub fn fnn_forward_derivs(net: &Fnn, x: &[f64]) -> Result<NetworkDerivs> {
    let mut out = NetworkDerivs::new(net.input_dim(), net.param_count());
    fnn_forward_derivs_into(net, x, &mut out)?;
    Ok(out)
}

/// See [`fnn_forward_derivs`]; fills a reusable buffer.
pub fn fnn_forward_derivs_into(net: &Fnn, x: &[f64], out: &mut NetworkDerivs) -> Result<()> {
    fnn_check(net)?;
    check_point(net.input_dim(), x)?;
    let dim = net.input_dim();
    let nl = net.layer_count();
    let p_total = net.param_count();
    debug_assert_eq!(out.du_dtheta.len(), p_total);
    out.reset();
    out.active = (0..p_total).collect();

    let mut s = FnnScratch::default();
    s.h = net.widths.iter().map(|&w| vec![0.0; w]).collect();
    s.hk = (0..dim).map(|_| net.widths.iter().map(|&w| vec![0.0; w]).collect()).collect();
    s.hkk = (0..dim).map(|_| net.widths.iter().map(|&w| vec![0.0; w]).collect()).collect();
    s.zk = (0..dim).map(|_| (0..nl).map(|l| vec![0.0; net.widths[l + 1]]).collect()).collect();
    s.zkk = (0..dim).map(|_| (0..nl).map(|l| vec![0.0; net.widths[l + 1]]).collect()).collect();
    s.bar = net.widths.iter().map(|&w| vec![0.0; w]).collect();
    s.bar_k = net.widths.iter().map(|&w| vec![0.0; w]).collect();
    s.bar_kk = net.widths.iter().map(|&w| vec![0.0; w]).collect();

    // Forward: boundary 0 is the input, boundary l+1 the output of layer l.
    s.h[0].copy_from_slice(x);
    for k in 0..dim {
        s.hk[k][0].iter_mut().for_each(|v| *v = 0.0);
        s.hk[k][0][k] = 1.0;
    }
    for l in 0..nl {
        let (win, wout) = (net.widths[l], net.widths[l + 1]);
        let wmat = &net.weights[l];
        for j in 0..wout {
            let row = &wmat[j * win..(j + 1) * win];
            let z = crate::linalg::dot(row, &s.h[l]) + net.biases[l][j];
            for k in 0..dim {
                s.zk[k][l][j] = crate::linalg::dot(row, &s.hk[k][l]);
                s.zkk[k][l][j] = crate::linalg::dot(row, &s.hkk[k][l]);
            }
            if l + 1 < nl {
                let h = z.tanh();
                let p = 1.0 - h * h;
                let t2 = -2.0 * h * p;
                s.h[l + 1][j] = h;
                for k in 0..dim {
                    let (zk, zkk) = (s.zk[k][l][j], s.zkk[k][l][j]);
                    s.hk[k][l + 1][j] = p * zk;
                    s.hkk[k][l + 1][j] = p * zkk + t2 * zk * zk;
                }
            } else {
                s.h[l + 1][j] = z;
                for k in 0..dim {
                    s.hk[k][l + 1][j] = s.zk[k][l][j];
                    s.hkk[k][l + 1][j] = s.zkk[k][l][j];
                }
            }
        }
    }
    out.u = s.h[nl][0];
    for k in 0..dim {
        out.du_dx[k] = s.hk[k][nl][0];
        out.d2u_dx2[k] = s.hkk[k][nl][0];
    }

    // One reverse pass per Jacobian row: the value row, then per axis the
    // first- and second-derivative rows.
    reverse_pass(net, &mut s, 0, Seed::Value, &mut out.du_dtheta);
    for k in 0..dim {
        reverse_pass(net, &mut s, k, Seed::FirstDeriv, &mut out.ddu_dx_dtheta[k]);
        reverse_pass(net, &mut s, k, Seed::SecondDeriv, &mut out.dd2u_dx2_dtheta[k]);
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Seed {
    Value,
    FirstDeriv,
    SecondDeriv,
}

/// Reverse propagation of the adjoint triple (z̄, z̄ₖ, z̄ₖₖ) for one scalar
/// output, accumulating the layer-major parameter gradient into `grad`.
fn reverse_pass(net: &Fnn, s: &mut FnnScratch, axis: usize, seed: Seed, grad: &mut [f64]) {
    let nl = net.layer_count();
    // Seed at the output boundary (scalar).
    for l in 0..=nl {
        s.bar[l].iter_mut().for_each(|v| *v = 0.0);
        s.bar_k[l].iter_mut().for_each(|v| *v = 0.0);
        s.bar_kk[l].iter_mut().for_each(|v| *v = 0.0);
    }
    match seed {
        Seed::Value => s.bar[nl][0] = 1.0,
        Seed::FirstDeriv => s.bar_k[nl][0] = 1.0,
        Seed::SecondDeriv => s.bar_kk[nl][0] = 1.0,
    }

    // Parameter offsets are layer-major; walk from the last layer down.
    let mut offsets = Vec::with_capacity(nl);
    let mut off = 0;
    for l in 0..nl {
        offsets.push(off);
        off += net.widths[l + 1] * net.widths[l] + net.widths[l + 1];
    }

    for l in (0..nl).rev() {
        let (win, wout) = (net.widths[l], net.widths[l + 1]);
        let base = offsets[l];
        // Adjoints at boundary l+1 refer to post-activation h; convert to
        // pre-activation z̄ first (identity for the linear output layer).
        let (zbar, zbar_k, zbar_kk): (Vec<f64>, Vec<f64>, Vec<f64>) = if l + 1 < nl {
            let mut zb = vec![0.0; wout];
            let mut zbk = vec![0.0; wout];
            let mut zbkk = vec![0.0; wout];
            for j in 0..wout {
                let h = s.h[l + 1][j];
                let p = 1.0 - h * h;
                let t2 = -2.0 * h * p;
                let t3 = 2.0 * p * (2.0 * h * h - p);
                let zk = s.zk[axis][l][j];
                let zkk = s.zkk[axis][l][j];
                zb[j] = s.bar[l + 1][j] * p
                    + s.bar_k[l + 1][j] * t2 * zk
                    + s.bar_kk[l + 1][j] * (t3 * zk * zk + t2 * zkk);
                zbk[j] = s.bar_k[l + 1][j] * p + s.bar_kk[l + 1][j] * 2.0 * t2 * zk;
                zbkk[j] = s.bar_kk[l + 1][j] * p;
            }
            (zb, zbk, zbkk)
        } else {
            (s.bar[l + 1].clone(), s.bar_k[l + 1].clone(), s.bar_kk[l + 1].clone())
        };

        // Accumulate parameter gradients and push adjoints to boundary l.
        s.bar[l].iter_mut().for_each(|v| *v = 0.0);
        s.bar_k[l].iter_mut().for_each(|v| *v = 0.0);
        s.bar_kk[l].iter_mut().for_each(|v| *v = 0.0);
        for j in 0..wout {
            let wrow = &net.weights[l][j * win..(j + 1) * win];
            let gw = &mut grad[base + j * win..base + (j + 1) * win];
            for i in 0..win {
                gw[i] += zbar[j] * s.h[l][i]
                    + zbar_k[j] * s.hk[axis][l][i]
                    + zbar_kk[j] * s.hkk[axis][l][i];
            }
            grad[base + wout * win + j] += zbar[j];
            for i in 0..win {
                s.bar[l][i] += wrow[i] * zbar[j];
                s.bar_k[l][i] += wrow[i] * zbar_k[j];
                s.bar_kk[l][i] += wrow[i] * zbar_kk[j];
            }
        }
    }
}

/// Either network family behind one interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Network {
    Pirbn(Pirbn),
    Fnn(Fnn),
}

impl Network {
    pub fn dim(&self) -> usize {
        match self {
            Network::Pirbn(n) => n.dim,
            Network::Fnn(n) => n.input_dim(),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Network::Pirbn(n) => n.param_count(),
            Network::Fnn(n) => n.param_count(),
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        match self {
            Network::Pirbn(n) => pirbn_forward(n, x),
            Network::Fnn(n) => Ok(fnn_forward_derivs(n, x)?.u),
        }
    }

    pub fn derivs_into(&self, x: &[f64], out: &mut NetworkDerivs) -> Result<()> {
        match self {
            Network::Pirbn(n) => pirbn_derivs_into(n, x, out),
            Network::Fnn(n) => fnn_forward_derivs_into(n, x, out),
        }
    }

    pub fn derivs(&self, x: &[f64]) -> Result<NetworkDerivs> {
        let mut out = NetworkDerivs::new(self.dim(), self.param_count());
        self.derivs_into(x, &mut out)?;
        Ok(out)
    }

    /// Copy of the trainable parameter vector: (a, b) for a PIRBN, layer-major
    /// weights and biases for an FNN.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Network::Pirbn(n) => n.a.iter().chain(&n.b).copied().collect(),
            Network::Fnn(n) => {
                let mut out = Vec::with_capacity(n.param_count());
                for l in 0..n.layer_count() {
                    out.extend_from_slice(&n.weights[l]);
                    out.extend_from_slice(&n.biases[l]);
                }
                out
            }
        }
    }

    /// Overwrite the trainable parameters from a flat vector in the same order
    /// as [`Network::params`].
    pub fn set_params(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                theta.len()
            )));
        }
        match self {
            Network::Pirbn(n) => {
                let d = n.d();
                n.a.copy_from_slice(&theta[..d]);
                n.b.copy_from_slice(&theta[d..]);
            }
            Network::Fnn(n) => {
                let mut off = 0;
                for l in 0..n.layer_count() {
                    let nw = n.weights[l].len();
                    n.weights[l].copy_from_slice(&theta[off..off + nw]);
                    off += nw;
                    let nb = n.biases[l].len();
                    n.biases[l].copy_from_slice(&theta[off..off + nb]);
                    off += nb;
                }
            }
        }
        Ok(())
    }
}

/// Build a PIRBN with centers on the given uniform grid, every shape parameter
/// set to `b0`, and outer weights drawn i.i.d. from the standard normal.
pub fn init_pirbn(kind: RbfKind, grid: &CenterGrid, b0: f64, seed: u64) -> Result<Pirbn> {
    if b0 == 0.0 {
        return Err(Error::DegenerateShape);
    }
    if !b0.is_finite() {
        return Err(Error::InvalidInput(format!("b0 is not finite: {b0}")));
    }
    let centers: Vec<f64> = grid.points().into_iter().flatten().collect();
    let d = grid.total();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    Ok(Pirbn { kind, dim: grid.dim(), a, b: vec![b0; d], centers })
}

/// Build a PIRBN with `count` centers drawn uniformly at random from the given
/// box instead of a regular grid. The center draws use a separate RNG stream
/// so the outer weights match those of [`init_pirbn`] under the same seed.
pub fn init_pirbn_random_centers(
    kind: RbfKind,
    ranges: &[(f64, f64)],
    count: usize,
    b0: f64,
    seed: u64,
) -> Result<Pirbn> {
    if b0 == 0.0 {
        return Err(Error::DegenerateShape);
    }
    if count == 0 || ranges.is_empty() {
        return Err(Error::InvalidInput("need at least one center and one axis".into()));
    }
    let dim = ranges.len();
    let mut crng = ChaCha8Rng::seed_from_u64(seed ^ CENTER_STREAM);
    let mut centers = Vec::with_capacity(count * dim);
    for _ in 0..count {
        for &(lo, hi) in ranges {
            centers.push(crng.gen_range(lo..hi));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..count).map(|_| rng.sample(StandardNormal)).collect();
    Ok(Pirbn { kind, dim, a, b: vec![b0; count], centers })
}

/// Build an FNN with weights drawn i.i.d. from N(0, 1/fan_in) and zero biases.
pub fn init_fnn(widths: &[usize], seed: u64) -> Result<Fnn> {
    if widths.len() < 3 || *widths.last().unwrap() != 1 || widths.iter().any(|&w| w == 0) {
        return Err(Error::InvalidInput(
            "FNN widths need an input width, at least one hidden layer, and a scalar output"
                .into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..widths.len() - 1 {
        let (win, wout) = (widths[l], widths[l + 1]);
        let std = (1.0 / win as f64).sqrt();
        let w: Vec<f64> =
            (0..wout * win).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect();
        weights.push(w);
        biases.push(vec![0.0; wout]);
    }
    Ok(Fnn { widths: widths.to_vec(), weights, biases })
}
