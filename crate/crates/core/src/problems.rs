//! Benchmark problem definitions: domains, collocation layouts, residual and
//! Jacobian assembly for the governing-equation and boundary blocks.
//!
//! A [`Problem`] holds the interior collocation points with their precomputed
//! forcing targets and the list of boundary conditions. [`assemble`] produces
//! the dense residual vectors and Jacobian blocks used for kernel analysis;
//! [`loss_and_grad`] fuses the same per-row computation into the loss,
//! gradient, and block traces without materializing the Jacobians.

use crate::error::{Error, Result};
use crate::grid::{cartesian, interior_linspace, linspace};
use crate::linalg::Mat;
use crate::model::{Network, NetworkDerivs};
use crate::oracle::{self, UcmConstants};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifies one of the benchmark boundary-value problems.
///
/// The 1D Poisson family is parameterized by a frequency multiplier `mu`
/// (solution `sin(2 mu pi (x - shift))`) and a domain shift, so the same
/// problem can be posed on `[0, 1]` or far from the origin on
/// `[shift, shift + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum ProblemId {
    /// `-u'' = 4 mu^2 pi^2 sin(2 mu pi (x - shift))` on `[shift, shift + 1]`
    /// with homogeneous Dirichlet ends.
    #[serde(rename = "poisson1d")]
    Poisson1D {
        #[serde(default = "default_mu")]
        mu: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `u'' = f` on `[20, 22]` where `f` is tailored so the solution blends a
    /// low-frequency and a high-frequency envelope.
    #[serde(rename = "mixed_freq1d")]
    MixedFreq1D,
    /// Nonlinear spring `u'' + 4 u + sin(u) = f` on `[0, 100]` with
    /// `u(0) = u'(0) = 0`.
    #[serde(rename = "spring1d")]
    Spring1D,
    /// `u_xx - 4 u_yy = 0` on the unit square with one inflow edge carrying
    /// both a value and a normal-derivative condition.
    #[serde(rename = "wave2d")]
    Wave2D,
    /// `u_t - 0.01 u_xx = g` on `[5, 10] x [5, 10]` with axis order `(x, t)`.
    #[serde(rename = "diffusion2d")]
    Diffusion2D,
    /// Start-up of viscoelastic channel flow: coupled velocity and shear
    /// stress fields on `(y, t)` in `[-0.5, 0.5] x [0, 4]`.
    #[serde(rename = "ucm_poiseuille")]
    UcmPoiseuille,
}

fn default_mu() -> f64 {
    1.0
}

impl ProblemId {
    /// Input dimensionality of the problem.
    pub fn input_dim(self) -> usize {
        match self {
            ProblemId::Poisson1D { .. } | ProblemId::MixedFreq1D | ProblemId::Spring1D => 1,
            ProblemId::Wave2D | ProblemId::Diffusion2D | ProblemId::UcmPoiseuille => 2,
        }
    }

    /// Number of unknown scalar fields (and hence networks) the problem
    /// trains jointly.
    pub fn field_count(self) -> usize {
        match self {
            ProblemId::UcmPoiseuille => 2,
            _ => 1,
        }
    }

    /// Number of governing residual families evaluated at each interior
    /// point.
    pub fn family_count(self) -> usize {
        match self {
            ProblemId::UcmPoiseuille => 2,
            _ => 1,
        }
    }

    /// Axis-aligned bounding box of the domain, one `(lo, hi)` pair per input
    /// axis.
    pub fn domain(self) -> Vec<(f64, f64)> {
        match self {
            ProblemId::Poisson1D { shift, .. } => vec![(shift, shift + 1.0)],
            ProblemId::MixedFreq1D => vec![(20.0, 22.0)],
            ProblemId::Spring1D => vec![(0.0, 100.0)],
            ProblemId::Wave2D => vec![(0.0, 1.0), (0.0, 1.0)],
            ProblemId::Diffusion2D => vec![(5.0, 10.0), (5.0, 10.0)],
            ProblemId::UcmPoiseuille => vec![(-0.5, 0.5), (0.0, 4.0)],
        }
    }

    /// Default interior collocation counts per axis.
    pub fn default_interior(self) -> Vec<usize> {
        match self {
            ProblemId::Poisson1D { .. } => vec![51],
            ProblemId::MixedFreq1D => vec![101],
            ProblemId::Spring1D => vec![1001],
            ProblemId::Wave2D | ProblemId::Diffusion2D => vec![51, 51],
            ProblemId::UcmPoiseuille => vec![26, 101],
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::Poisson1D { mu, shift } => {
                write!(f, "poisson1d(mu={mu}, shift={shift})")
            }
            ProblemId::MixedFreq1D => write!(f, "mixed_freq1d"),
            ProblemId::Spring1D => write!(f, "spring1d"),
            ProblemId::Wave2D => write!(f, "wave2d"),
            ProblemId::Diffusion2D => write!(f, "diffusion2d"),
            ProblemId::UcmPoiseuille => write!(f, "ucm_poiseuille"),
        }
    }
}

/// What a boundary row constrains: the field value or one of its first
/// spatial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BcKind {
    Value,
    FirstDerivative { axis: usize },
}

/// One boundary condition row: a point, the constrained quantity, the index
/// of the constrained network, and the target value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub point: Vec<f64>,
    pub bc: BcKind,
    pub net: usize,
    pub target: f64,
}

/// Per-axis interior collocation counts overriding a problem's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub interior: Vec<usize>,
}

/// A fully instantiated benchmark: collocation points, precomputed forcing
/// targets, and boundary conditions.
///
/// Governing residual rows are ordered family-major: all rows of family 0
/// over the interior points, then all rows of family 1, and so on. Boundary
/// rows follow the order of `boundary`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub id: ProblemId,
    /// Interior collocation counts per axis (kept for metric grids).
    pub counts: Vec<usize>,
    pub interior: Vec<Vec<f64>>,
    /// Forcing targets, one inner entry per residual family, per interior
    /// point.
    pub forcing: Vec<Vec<f64>>,
    pub boundary: Vec<BoundaryCondition>,
}

impl Problem {
    pub fn families(&self) -> usize {
        self.id.family_count()
    }

    /// Number of governing residual rows.
    pub fn n_g(&self) -> usize {
        self.families() * self.interior.len()
    }

    /// Number of boundary residual rows.
    pub fn n_b(&self) -> usize {
        self.boundary.len()
    }

    /// Dense evaluation grid for error metrics: the full domain sampled
    /// inclusively at ten times the interior resolution in one dimension and
    /// twice per axis in two.
    pub fn metric_points(&self) -> Vec<Vec<f64>> {
        let factor = if self.id.input_dim() == 1 { 10 } else { 2 };
        let axes: Vec<Vec<f64>> = self
            .id
            .domain()
            .iter()
            .zip(&self.counts)
            .map(|(&(lo, hi), &n)| linspace(lo, hi, factor * n + 1))
            .collect();
        cartesian(&axes)
    }
}

/// Instantiate a benchmark at its default resolution or an override.
pub fn build_problem(id: ProblemId, resolution: Option<&Resolution>) -> Result<Problem> {
    let counts = match resolution {
        Some(r) => {
            if r.interior.len() != id.input_dim() {
                return Err(Error::InvalidInput(format!(
                    "{id} needs {} interior counts, got {}",
                    id.input_dim(),
                    r.interior.len()
                )));
            }
            if r.interior.iter().any(|&n| n == 0) {
                return Err(Error::InvalidInput("interior counts must be positive".into()));
            }
            r.interior.clone()
        }
        None => id.default_interior(),
    };

    let axes: Vec<Vec<f64>> = id
        .domain()
        .iter()
        .zip(&counts)
        .map(|(&(lo, hi), &n)| interior_linspace(lo, hi, n))
        .collect();
    let interior = cartesian(&axes);
    let forcing = interior.iter().map(|x| oracle::forcing(id, x)).collect();
    let boundary = build_boundary(id, &counts);
    Ok(Problem { id, counts, interior, forcing, boundary })
}

fn value_bc(point: Vec<f64>, net: usize, target: f64) -> BoundaryCondition {
    BoundaryCondition { point, bc: BcKind::Value, net, target }
}

fn build_boundary(id: ProblemId, counts: &[usize]) -> Vec<BoundaryCondition> {
    let domain = id.domain();
    match id {
        ProblemId::Poisson1D { .. } | ProblemId::MixedFreq1D => {
            let (lo, hi) = domain[0];
            vec![value_bc(vec![lo], 0, 0.0), value_bc(vec![hi], 0, 0.0)]
        }
        ProblemId::Spring1D => vec![
            value_bc(vec![0.0], 0, 0.0),
            BoundaryCondition {
                point: vec![0.0],
                bc: BcKind::FirstDerivative { axis: 0 },
                net: 0,
                target: 0.0,
            },
        ],
        ProblemId::Wave2D => {
            // Both lateral edges pin the value to zero; the inflow edge
            // x = 0 carries the wave profile and a zero normal derivative.
            // Nothing constrains the outflow edge x = 1.
            let xs = linspace(0.0, 1.0, counts[0]);
            let ys = linspace(0.0, 1.0, counts[1]);
            let mut out = Vec::new();
            for &x in &xs {
                out.push(value_bc(vec![x, 0.0], 0, 0.0));
                out.push(value_bc(vec![x, 1.0], 0, 0.0));
            }
            for &y in &ys {
                out.push(value_bc(vec![0.0, y], 0, oracle::wave_u(0.0, y)));
                out.push(BoundaryCondition {
                    point: vec![0.0, y],
                    bc: BcKind::FirstDerivative { axis: 0 },
                    net: 0,
                    target: 0.0,
                });
            }
            out
        }
        ProblemId::Diffusion2D => {
            let (xr, tr) = (domain[0], domain[1]);
            let xs = linspace(xr.0, xr.1, counts[0]);
            let ts = linspace(tr.0, tr.1, counts[1]);
            let mut out = Vec::new();
            for &t in &ts {
                out.push(value_bc(vec![xr.0, t], 0, oracle::diffusion_u(xr.0, t)));
                out.push(value_bc(vec![xr.1, t], 0, oracle::diffusion_u(xr.1, t)));
            }
            for &x in &xs {
                out.push(value_bc(vec![x, tr.0], 0, oracle::diffusion_u(x, tr.0)));
            }
            out
        }
        ProblemId::UcmPoiseuille => {
            // No-slip walls for the velocity at every time; initial
            // conditions for both fields. The initial targets come from the
            // truncated series itself so the boundary data stays consistent
            // with the error reference.
            let c = UcmConstants::benchmark();
            let ts = linspace(domain[1].0, domain[1].1, counts[1]);
            let ys = linspace(domain[0].0, domain[0].1, counts[0]);
            let mut out = Vec::new();
            for &t in &ts {
                out.push(value_bc(vec![-c.h, t], 0, 0.0));
                out.push(value_bc(vec![c.h, t], 0, 0.0));
            }
            for &y in &ys {
                out.push(value_bc(vec![y, 0.0], 0, oracle::ucm_velocity(&c, y, 0.0)));
            }
            for &y in &ys {
                out.push(value_bc(vec![y, 0.0], 1, oracle::ucm_stress(&c, y, 0.0)));
            }
            out
        }
    }
}

/// Dense residual vectors and Jacobian blocks of one parameter state.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSystem {
    pub r_g: Vec<f64>,
    pub r_b: Vec<f64>,
    /// n_g x P, where P counts the parameters of all networks.
    pub j_g: Mat,
    /// n_b x P.
    pub j_b: Mat,
}

/// Loss terms, fused gradient, and Jacobian block traces of one parameter
/// state.
///
/// `grad` is the gradient of `w_g * loss_g + w_b * loss_b`. The traces are
/// the squared Frobenius norms of the Jacobian blocks, equal to the traces of
/// the corresponding kernel blocks; they fall out of the row sweep for free.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub loss_g: f64,
    pub loss_b: f64,
    pub grad: Vec<f64>,
    pub trace_gg: f64,
    pub trace_bb: f64,
}

/// Reusable buffers for residual-row evaluation.
pub struct EvalScratch {
    recs: Vec<NetworkDerivs>,
    row: Vec<f64>,
    touched: Vec<usize>,
}

impl EvalScratch {
    pub fn new(nets: &[Network]) -> Self {
        let p_total: usize = nets.iter().map(Network::param_count).sum();
        EvalScratch {
            recs: nets
                .iter()
                .map(|n| NetworkDerivs::new(n.dim(), n.param_count()))
                .collect(),
            row: vec![0.0; p_total],
            touched: Vec::new(),
        }
    }
}

/// Start offset of each network's parameters in the stacked vector, plus the
/// total count.
pub fn param_offsets(nets: &[Network]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(nets.len());
    let mut total = 0;
    for net in nets {
        offsets.push(total);
        total += net.param_count();
    }
    (offsets, total)
}

fn check_nets(problem: &Problem, nets: &[Network]) -> Result<()> {
    if nets.len() != problem.id.field_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} trains {} fields, got {} networks",
            problem.id,
            problem.id.field_count(),
            nets.len()
        )));
    }
    for net in nets {
        if net.dim() != problem.id.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "network input dimension {} does not match {}",
                net.dim(),
                problem.id
            )));
        }
    }
    Ok(())
}

fn add_scaled(
    row: &mut [f64],
    touched: &mut Vec<usize>,
    offset: usize,
    active: &[usize],
    src: &[f64],
    coef: f64,
) {
    for &i in active {
        row[offset + i] += coef * src[i];
        touched.push(offset + i);
    }
}

/// Residual of one governing family at the current point, with its Jacobian
/// row accumulated into `row` at the indices recorded in `touched`.
fn governing_row(
    id: ProblemId,
    family: usize,
    recs: &[NetworkDerivs],
    offsets: &[usize],
    g: f64,
    row: &mut [f64],
    touched: &mut Vec<usize>,
) -> f64 {
    match id {
        ProblemId::Poisson1D { .. } => {
            let rec = &recs[0];
            add_scaled(row, touched, offsets[0], &rec.active, &rec.dd2u_dx2_dtheta[0], -1.0);
            -rec.d2u_dx2[0] - g
        }
        ProblemId::MixedFreq1D => {
            let rec = &recs[0];
            add_scaled(row, touched, offsets[0], &rec.active, &rec.dd2u_dx2_dtheta[0], 1.0);
            rec.d2u_dx2[0] - g
        }
        ProblemId::Spring1D => {
            let rec = &recs[0];
            let stiffness = 4.0 + rec.u.cos();
            add_scaled(row, touched, offsets[0], &rec.active, &rec.dd2u_dx2_dtheta[0], 1.0);
            add_scaled(row, touched, offsets[0], &rec.active, &rec.du_dtheta, stiffness);
            rec.d2u_dx2[0] + 4.0 * rec.u + rec.u.sin() - g
        }
        ProblemId::Wave2D => {
            let rec = &recs[0];
            add_scaled(row, touched, offsets[0], &rec.active, &rec.dd2u_dx2_dtheta[0], 1.0);
            add_scaled(row, touched, offsets[0], &rec.active, &rec.dd2u_dx2_dtheta[1], -4.0);
            rec.d2u_dx2[0] - 4.0 * rec.d2u_dx2[1] - g
        }
        ProblemId::Diffusion2D => {
            let rec = &recs[0];
            add_scaled(row, touched, offsets[0], &rec.active, &rec.ddu_dx_dtheta[1], 1.0);
            add_scaled(row, touched, offsets[0], &rec.active, &rec.dd2u_dx2_dtheta[0], -0.01);
            rec.du_dx[1] - 0.01 * rec.d2u_dx2[0] - g
        }
        ProblemId::UcmPoiseuille => {
            let c = UcmConstants::benchmark();
            let (u, tau) = (&recs[0], &recs[1]);
            if family == 0 {
                // Momentum: rho u_t - tau_y.
                add_scaled(row, touched, offsets[0], &u.active, &u.ddu_dx_dtheta[1], c.rho);
                add_scaled(row, touched, offsets[1], &tau.active, &tau.ddu_dx_dtheta[0], -1.0);
                c.rho * u.du_dx[1] - tau.du_dx[0] - g
            } else {
                // Constitutive: lambda tau_t + tau - eta0 u_y.
                add_scaled(row, touched, offsets[1], &tau.active, &tau.ddu_dx_dtheta[1], c.lambda);
                add_scaled(row, touched, offsets[1], &tau.active, &tau.du_dtheta, 1.0);
                add_scaled(row, touched, offsets[0], &u.active, &u.ddu_dx_dtheta[0], -c.eta0);
                c.lambda * tau.du_dx[1] + tau.u - c.eta0 * u.du_dx[0] - g
            }
        }
    }
}

/// Residual of one boundary row, with its Jacobian row accumulated like
/// [`governing_row`]. `rec` must hold the constrained network's derivatives
/// at the condition's point.
fn boundary_row(
    bc: &BoundaryCondition,
    rec: &NetworkDerivs,
    offset: usize,
    row: &mut [f64],
    touched: &mut Vec<usize>,
) -> f64 {
    match bc.bc {
        BcKind::Value => {
            add_scaled(row, touched, offset, &rec.active, &rec.du_dtheta, 1.0);
            rec.u - bc.target
        }
        BcKind::FirstDerivative { axis } => {
            add_scaled(row, touched, offset, &rec.active, &rec.ddu_dx_dtheta[axis], 1.0);
            rec.du_dx[axis] - bc.target
        }
    }
}

/// Evaluate the residual vectors and dense Jacobian blocks of the current
/// parameter state.
pub fn assemble(problem: &Problem, nets: &[Network]) -> Result<ResidualSystem> {
    check_nets(problem, nets)?;
    let (offsets, p_total) = param_offsets(nets);
    let fam = problem.families();
    let n_pts = problem.interior.len();
    let mut sys = ResidualSystem {
        r_g: vec![0.0; fam * n_pts],
        r_b: vec![0.0; problem.n_b()],
        j_g: Mat::zeros(fam * n_pts, p_total),
        j_b: Mat::zeros(problem.n_b(), p_total),
    };
    let mut s = EvalScratch::new(nets);

    for (k, x) in problem.interior.iter().enumerate() {
        for (net, rec) in nets.iter().zip(&mut s.recs) {
            net.derivs_into(x, rec)?;
        }
        for f in 0..fam {
            let r = governing_row(
                problem.id,
                f,
                &s.recs,
                &offsets,
                problem.forcing[k][f],
                &mut s.row,
                &mut s.touched,
            );
            let ridx = f * n_pts + k;
            sys.r_g[ridx] = r;
            let dst = sys.j_g.row_mut(ridx);
            for &i in &s.touched {
                dst[i] += s.row[i];
                s.row[i] = 0.0;
            }
            s.touched.clear();
        }
    }

    for (k, bc) in problem.boundary.iter().enumerate() {
        nets[bc.net].derivs_into(&bc.point, &mut s.recs[bc.net])?;
        let r = boundary_row(bc, &s.recs[bc.net], offsets[bc.net], &mut s.row, &mut s.touched);
        sys.r_b[k] = r;
        let dst = sys.j_b.row_mut(k);
        for &i in &s.touched {
            dst[i] += s.row[i];
            s.row[i] = 0.0;
        }
        s.touched.clear();
    }
    Ok(sys)
}

/// Fused sweep over all residual rows: loss terms, the gradient of
/// `w_g * loss_g + w_b * loss_b`, and the kernel block traces, without
/// materializing Jacobians.
pub fn loss_and_grad(
    problem: &Problem,
    nets: &[Network],
    w_g: f64,
    w_b: f64,
    s: &mut EvalScratch,
) -> Result<LossGrad> {
    check_nets(problem, nets)?;
    let (offsets, p_total) = param_offsets(nets);
    debug_assert_eq!(s.row.len(), p_total);
    let fam = problem.families();
    let mut out = LossGrad {
        loss_g: 0.0,
        loss_b: 0.0,
        grad: vec![0.0; p_total],
        trace_gg: 0.0,
        trace_bb: 0.0,
    };

    for (k, x) in problem.interior.iter().enumerate() {
        for (net, rec) in nets.iter().zip(&mut s.recs) {
            net.derivs_into(x, rec)?;
        }
        for f in 0..fam {
            let r = governing_row(
                problem.id,
                f,
                &s.recs,
                &offsets,
                problem.forcing[k][f],
                &mut s.row,
                &mut s.touched,
            );
            out.loss_g += 0.5 * r * r;
            for &i in &s.touched {
                let v = s.row[i];
                s.row[i] = 0.0;
                out.grad[i] += w_g * r * v;
                out.trace_gg += v * v;
            }
            s.touched.clear();
        }
    }

    for bc in &problem.boundary {
        nets[bc.net].derivs_into(&bc.point, &mut s.recs[bc.net])?;
        let r = boundary_row(bc, &s.recs[bc.net], offsets[bc.net], &mut s.row, &mut s.touched);
        out.loss_b += 0.5 * r * r;
        for &i in &s.touched {
            let v = s.row[i];
            s.row[i] = 0.0;
            out.grad[i] += w_b * r * v;
            out.trace_bb += v * v;
        }
        s.touched.clear();
    }
    Ok(out)
}
