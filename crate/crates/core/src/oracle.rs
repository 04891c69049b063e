//! Closed-form reference solutions and forcing terms for every benchmark,
//! plus a finite-difference self-check that applies each governing operator
//! to its exact solution and confirms the forcing matches.
//!
//! Residual targets, trained-model error metrics, and test tolerances all key
//! off this module, so it is validated independently: the self-check builds
//! derivatives from difference quotients only and never calls the analytic
//! derivative code in [`crate::model`].

use crate::fd;
use crate::grid;
use crate::problems::ProblemId;
use std::f64::consts::PI;

/// Solution of the Poisson benchmark, `sin(2 mu pi (x - shift))`.
pub fn poisson_u(mu: f64, shift: f64, x: f64) -> f64 {
    (2.0 * mu * PI * (x - shift)).sin()
}

/// Forcing of the Poisson benchmark under the operator `-u''`.
pub fn poisson_forcing(mu: f64, shift: f64, x: f64) -> f64 {
    let k = 2.0 * mu * PI;
    k * k * (k * (x - shift)).sin()
}

/// Solution of the mixed-frequency benchmark on `[20, 22]`: a low-frequency
/// wave under the envelope peaking at x = 20 plus a high-frequency wave under
/// the envelope peaking at x = 22.
pub fn mixed_freq_u(x: f64) -> f64 {
    let a = (22.0 - x) / 2.0;
    let b = (x - 20.0) / 2.0;
    a * a * (2.0 * PI * x).sin() + b * b * (16.0 * PI * x).sin()
}

/// Second derivative of [`mixed_freq_u`], which is also the benchmark forcing
/// under the operator `u''`.
pub fn mixed_freq_forcing(x: f64) -> f64 {
    let s1 = (2.0 * PI * x).sin();
    let c1 = (2.0 * PI * x).cos();
    let s2 = (16.0 * PI * x).sin();
    let c2 = (16.0 * PI * x).cos();
    let a2 = (22.0 - x) * (22.0 - x) / 4.0;
    let b2 = (x - 20.0) * (x - 20.0) / 4.0;
    0.5 * s1 - 2.0 * PI * (22.0 - x) * c1 - 4.0 * PI * PI * a2 * s1
        + 0.5 * s2
        + 16.0 * PI * (x - 20.0) * c2
        - 256.0 * PI * PI * b2 * s2
}

/// Solution of the nonlinear spring benchmark, `x sin(x)`.
pub fn spring_u(x: f64) -> f64 {
    x * x.sin()
}

/// Forcing of the spring benchmark under the operator `u'' + 4u + sin(u)`.
pub fn spring_forcing(x: f64) -> f64 {
    2.0 * x.cos() + 3.0 * x * x.sin() + (x * x.sin()).sin()
}

/// Solution of the 2D wave benchmark: two traveling-wave harmonics of
/// `u_xx = 4 u_yy` on the unit square.
pub fn wave_u(x: f64, y: f64) -> f64 {
    (2.0 * PI * x).cos() * (PI * y).sin() + 0.5 * (8.0 * PI * x).cos() * (4.0 * PI * y).sin()
}

/// One-dimensional profile whose product form builds the diffusion solution.
pub fn diffusion_profile(s: f64) -> f64 {
    2.0 * (PI * s + PI / 5.0).cos() + 1.5 * (2.0 * PI * s - 3.0 * PI / 5.0).cos()
}

/// First derivative of [`diffusion_profile`].
pub fn diffusion_profile_d1(s: f64) -> f64 {
    -2.0 * PI * (PI * s + PI / 5.0).sin() - 3.0 * PI * (2.0 * PI * s - 3.0 * PI / 5.0).sin()
}

/// Second derivative of [`diffusion_profile`].
pub fn diffusion_profile_d2(s: f64) -> f64 {
    -2.0 * PI * PI * (PI * s + PI / 5.0).cos()
        - 6.0 * PI * PI * (2.0 * PI * s - 3.0 * PI / 5.0).cos()
}

/// Solution of the diffusion benchmark, the separable product
/// `X(x) X(t)` of [`diffusion_profile`] with itself.
pub fn diffusion_u(x: f64, t: f64) -> f64 {
    diffusion_profile(x) * diffusion_profile(t)
}

/// Forcing of the diffusion benchmark under the operator `u_t - 0.01 u_xx`.
pub fn diffusion_forcing(x: f64, t: f64) -> f64 {
    diffusion_profile(x) * diffusion_profile_d1(t)
        - 0.01 * diffusion_profile_d2(x) * diffusion_profile(t)
}

/// Physical constants of the viscoelastic channel-flow benchmark and the
/// truncation order of its series solution.
///
/// The flow starts from rest between plates at `y = -h` and `y = +h` under a
/// constant body force `f` and obeys the upper-convected Maxwell model with
/// density `rho`, viscosity `eta0`, and relaxation time `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcmConstants {
    pub rho: f64,
    pub eta0: f64,
    pub lambda: f64,
    pub f: f64,
    pub h: f64,
    /// Number of odd Fourier modes summed by [`ucm_series`].
    pub n_terms: usize,
}

impl UcmConstants {
    /// Constants of the benchmark configuration.
    pub fn benchmark() -> Self {
        UcmConstants {
            rho: 1.0 / 3.0,
            eta0: 0.5,
            lambda: 1.0 / 3.0,
            f: -1.5,
            h: 0.5,
            n_terms: 200,
        }
    }

    /// Elasticity number `lambda eta0 / (rho h^2)` controlling whether a mode
    /// oscillates or relaxes monotonically.
    pub fn elasticity(&self) -> f64 {
        self.lambda * self.eta0 / (self.rho * self.h * self.h)
    }

    /// Steady centerline velocity `-f h^2 / (3 eta0)`, the scale on which the
    /// dimensionless series is defined.
    pub fn max_velocity(&self) -> f64 {
        -self.f * self.h * self.h / (3.0 * self.eta0)
    }

    /// Shear-wave speed `sqrt(eta0 / (rho lambda))` at which start-up fronts
    /// cross the channel.
    pub fn wave_speed(&self) -> f64 {
        (self.eta0 / (self.rho * self.lambda)).sqrt()
    }
}

impl Default for UcmConstants {
    fn default() -> Self {
        UcmConstants::benchmark()
    }
}

/// Dimensionless velocity and shear stress `(U, T_xy)` of the start-up
/// channel flow at position `y` and time `t`.
///
/// Both fields are scaled by [`UcmConstants::max_velocity`]. Each odd mode
/// `N_i = (2i - 1) pi` relaxes as `exp(-t / (2 lambda))` times a modal factor
/// that oscillates when `E N_i^2 > 1` and is hyperbolic otherwise; the two
/// branches are one analytic function of `E N_i^2`, continuous across the
/// crossover. The mode sum telescopes against the steady profile so that
/// `U(y, 0) = 0` and `T_xy(y, 0) = 0` up to series truncation, and both walls
/// pin `U` to zero exactly.
pub fn ucm_series(c: &UcmConstants, y: f64, t: f64) -> (f64, f64) {
    let e = c.elasticity();
    let phi = (y + c.h) / (2.0 * c.h);
    let z = t / (2.0 * c.lambda);
    let decay = (-z).exp();
    let tau_coef = 48.0 * c.eta0 / c.h;

    let eta = y / c.h;
    let mut u = 1.5 * (1.0 - eta * eta);
    let mut tau = -3.0 * c.eta0 * y / (c.h * c.h);
    for i in 1..=c.n_terms {
        let n = (2 * i - 1) as f64 * PI;
        let en2 = e * n * n;
        let gamma = 1.0 - 0.5 * en2;
        // cg is cos(p z) or cosh(q z); sg is sin(p z)/p or sinh(q z)/q.
        // sg_env bounds |sg| for the tail estimate below.
        let (cg, sg, sg_env) = if en2 > 1.0 {
            let p = (en2 - 1.0).sqrt();
            ((p * z).cos(), (p * z).sin() / p, 1.0 / p)
        } else if en2 < 1.0 {
            let q = (1.0 - en2).sqrt();
            let sg = (q * z).sinh() / q;
            ((q * z).cosh(), sg, sg.abs())
        } else {
            (1.0, z, z.abs())
        };
        let g = cg + gamma * sg;
        let q_mode = -(cg + sg) / (2.0 * n);
        let phase = n * phi;
        u -= 48.0 * phase.sin() / (n * n * n) * decay * g;
        tau += tau_coef * phase.cos() / n * decay * q_mode;

        // Envelope of every remaining term; the modal amplitudes decrease in
        // i, so once the envelope is negligible the tail cannot matter. Only
        // effective at late times when the shared exponential has collapsed.
        let cg_env = cg.abs().max(1.0);
        let env_u = 48.0 / (n * n * n) * decay * (cg_env + gamma.abs() * sg_env);
        let env_tau = tau_coef / (2.0 * n * n) * decay * (cg_env + sg_env);
        if i >= 8 && env_u + env_tau < 1e-12 {
            break;
        }
    }
    (u, tau)
}

/// Exact velocity of the channel-flow benchmark at `(y, t)`.
pub fn ucm_velocity(c: &UcmConstants, y: f64, t: f64) -> f64 {
    c.max_velocity() * ucm_series(c, y, t).0
}

/// Exact shear stress of the channel-flow benchmark at `(y, t)`.
pub fn ucm_stress(c: &UcmConstants, y: f64, t: f64) -> f64 {
    c.max_velocity() * ucm_series(c, y, t).1
}

/// Exact scalar fields of a problem at a point, one entry per trained
/// network. The channel flow returns `[velocity, stress]`; every other
/// benchmark returns a single entry.
pub fn exact_fields(id: ProblemId, x: &[f64]) -> Vec<f64> {
    match id {
        ProblemId::Poisson1D { mu, shift } => vec![poisson_u(mu, shift, x[0])],
        ProblemId::MixedFreq1D => vec![mixed_freq_u(x[0])],
        ProblemId::Spring1D => vec![spring_u(x[0])],
        ProblemId::Wave2D => vec![wave_u(x[0], x[1])],
        ProblemId::Diffusion2D => vec![diffusion_u(x[0], x[1])],
        ProblemId::UcmPoiseuille => {
            let c = UcmConstants::benchmark();
            let (u, tau) = ucm_series(&c, x[0], x[1]);
            let scale = c.max_velocity();
            vec![scale * u, scale * tau]
        }
    }
}

/// Exact primary field of a problem at a point (the velocity for the channel
/// flow).
pub fn exact_u(id: ProblemId, x: &[f64]) -> f64 {
    exact_fields(id, x)[0]
}

/// Forcing targets of the governing operator at a point, one entry per
/// residual family.
///
/// Conventions are fixed per benchmark: the Poisson family uses `-u''`, the
/// mixed-frequency problem `u''`, the spring `u'' + 4u + sin(u)`, the wave
/// `u_xx - 4 u_yy` (zero forcing), diffusion `u_t - 0.01 u_xx`, and the
/// channel flow the momentum balance `rho u_t - tau_y` (forced by the body
/// force) followed by the constitutive law `lambda tau_t + tau - eta0 u_y`
/// (zero forcing).
pub fn forcing(id: ProblemId, x: &[f64]) -> Vec<f64> {
    match id {
        ProblemId::Poisson1D { mu, shift } => vec![poisson_forcing(mu, shift, x[0])],
        ProblemId::MixedFreq1D => vec![mixed_freq_forcing(x[0])],
        ProblemId::Spring1D => vec![spring_forcing(x[0])],
        ProblemId::Wave2D => vec![0.0],
        ProblemId::Diffusion2D => vec![diffusion_forcing(x[0], x[1])],
        ProblemId::UcmPoiseuille => vec![-UcmConstants::benchmark().f, 0.0],
    }
}

/// One residual family evaluated at one point by finite differences: the
/// operator residual against the forcing and the magnitude scale of the terms
/// entering it.
#[derive(Debug, Clone, Copy)]
pub struct FdResidual {
    pub residual: f64,
    pub scale: f64,
}

/// Applies the governing operator to the exact solution with central
/// differences and returns the residual of each family against its forcing.
///
/// First derivatives use the fine relative step of [`fd::central_diff`];
/// second derivatives use the coarser absolute step of
/// [`fd::second_central_diff`] to keep roundoff out of the h^2 quotient.
pub fn fd_operator_residuals(id: ProblemId, x: &[f64]) -> Vec<FdResidual> {
    match id {
        ProblemId::Poisson1D { mu, shift } => {
            let upp = fd::second_central_diff(|s| poisson_u(mu, shift, s), x[0]);
            let g = poisson_forcing(mu, shift, x[0]);
            vec![FdResidual {
                residual: -upp - g,
                scale: upp.abs() + g.abs(),
            }]
        }
        ProblemId::MixedFreq1D => {
            let upp = fd::second_central_diff(mixed_freq_u, x[0]);
            let g = mixed_freq_forcing(x[0]);
            vec![FdResidual {
                residual: upp - g,
                scale: upp.abs() + g.abs(),
            }]
        }
        ProblemId::Spring1D => {
            let upp = fd::second_central_diff(spring_u, x[0]);
            let u = spring_u(x[0]);
            let g = spring_forcing(x[0]);
            vec![FdResidual {
                residual: upp + 4.0 * u + u.sin() - g,
                scale: upp.abs() + 4.0 * u.abs() + 1.0 + g.abs(),
            }]
        }
        ProblemId::Wave2D => {
            let (x0, y0) = (x[0], x[1]);
            let uxx = fd::second_central_diff(|s| wave_u(s, y0), x0);
            let uyy = fd::second_central_diff(|s| wave_u(x0, s), y0);
            vec![FdResidual {
                residual: uxx - 4.0 * uyy,
                scale: uxx.abs() + 4.0 * uyy.abs(),
            }]
        }
        ProblemId::Diffusion2D => {
            let (x0, t0) = (x[0], x[1]);
            let ut = fd::central_diff(|s| diffusion_u(x0, s), t0);
            let uxx = fd::second_central_diff(|s| diffusion_u(s, t0), x0);
            let g = diffusion_forcing(x0, t0);
            vec![FdResidual {
                residual: ut - 0.01 * uxx - g,
                scale: ut.abs() + 0.01 * uxx.abs() + g.abs(),
            }]
        }
        ProblemId::UcmPoiseuille => {
            let c = UcmConstants::benchmark();
            let (y0, t0) = (x[0], x[1]);
            let ut = fd::central_diff(|s| ucm_velocity(&c, y0, s), t0);
            let uy = fd::central_diff(|s| ucm_velocity(&c, s, t0), y0);
            let taut = fd::central_diff(|s| ucm_stress(&c, y0, s), t0);
            let tauy = fd::central_diff(|s| ucm_stress(&c, s, t0), y0);
            let tau = ucm_stress(&c, y0, t0);
            let g_mom = -c.f;
            vec![
                FdResidual {
                    residual: c.rho * ut - tauy - g_mom,
                    scale: (c.rho * ut).abs() + tauy.abs() + g_mom.abs(),
                },
                FdResidual {
                    residual: c.lambda * taut + tau - c.eta0 * uy,
                    scale: (c.lambda * taut).abs() + tau.abs() + (c.eta0 * uy).abs(),
                },
            ]
        }
    }
}

/// Outcome of sweeping [`fd_operator_residuals`] over a dense interior grid.
///
/// The relative residual divides the worst absolute residual of a family by
/// the largest term scale that family reaches anywhere on the grid, so points
/// where the solution passes through zero do not blow the ratio up.
#[derive(Debug, Clone)]
pub struct SelfCheckReport {
    pub problem: ProblemId,
    pub tolerance: f64,
    pub max_residual: f64,
    pub scale: f64,
    pub max_rel_residual: f64,
    pub worst_point: Vec<f64>,
    pub passed: bool,
}

/// Relative tolerance of the operator self-check. The channel flow gets a
/// looser bound because its fields come from a truncated mode sum rather than
/// elementary functions.
pub fn selfcheck_tolerance(id: ProblemId) -> f64 {
    match id {
        ProblemId::UcmPoiseuille => 1e-3,
        _ => 1e-4,
    }
}

/// Verifies the exact solution of a problem against its forcing on a dense
/// interior grid using only finite differences.
pub fn oracle_selfcheck(id: ProblemId) -> SelfCheckReport {
    let domain = id.domain();
    let per_axis = if domain.len() == 1 { 201 } else { 41 };
    let axes: Vec<Vec<f64>> = domain
        .iter()
        .map(|&(lo, hi)| grid::interior_linspace(lo, hi, per_axis))
        .collect();
    let points = grid::cartesian(&axes);

    let families = forcing(id, &points[0]).len();
    let mut max_res = vec![0.0f64; families];
    let mut max_scale = vec![0.0f64; families];
    let mut worst = (0.0f64, points[0].clone());
    for x in &points {
        for (f, r) in fd_operator_residuals(id, x).iter().enumerate() {
            if r.residual.abs() > max_res[f] {
                max_res[f] = r.residual.abs();
            }
            if r.scale > max_scale[f] {
                max_scale[f] = r.scale;
            }
            if r.residual.abs() > worst.0 {
                worst = (r.residual.abs(), x.clone());
            }
        }
    }

    let tolerance = selfcheck_tolerance(id);
    let max_rel = (0..families)
        .map(|f| max_res[f] / max_scale[f])
        .fold(0.0, f64::max);
    let overall_res = max_res.iter().fold(0.0f64, |a, &b| a.max(b));
    let overall_scale = max_scale.iter().fold(0.0f64, |a, &b| a.max(b));
    SelfCheckReport {
        problem: id,
        tolerance,
        max_residual: overall_res,
        scale: overall_scale,
        max_rel_residual: max_rel,
        worst_point: worst.1,
        passed: max_rel <= tolerance,
    }
}
