//! Radial basis functions and their closed-form derivatives.
//!
//! Every family is a function of the squared distance s = ‖x − c‖² and the
//! shape parameter b, entering only as b², so each kernel is even in b and b
//! may be trained without a positivity constraint:
//!
//! - Gaussian: exp(−b²s), bounded in (0, 1]
//! - inverse quadratic: 1/(1 + b²s), bounded in (0, 1]
//! - inverse multiquadric: (1 + b²s)^(−1/2), bounded in (0, 1]
//! - thin plate spline: b²s·ln(√(b²s) + 1), unbounded (the "+1" inside the
//!   logarithm is kept verbatim; it regularizes the classical r²·ln r at r = 0)
//!
//! [`rbf_derivs`] returns the six derivative groups needed to assemble PDE
//! residual rows and their parameter Jacobians: the value, first and pure
//! second spatial derivatives per axis, and the b-derivative of each.

use crate::error::{Error, Result};
use crate::grid::sq_dist;
use serde::{Deserialize, Serialize};

/// The supported radial basis function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbfKind {
    Gaussian,
    InverseQuadratic,
    InverseMultiquadric,
    ThinPlateSpline,
}

impl RbfKind {
    pub const ALL: [RbfKind; 4] = [
        RbfKind::Gaussian,
        RbfKind::InverseQuadratic,
        RbfKind::InverseMultiquadric,
        RbfKind::ThinPlateSpline,
    ];

    /// Whether the family is bounded in (0, 1] (all except the thin plate
    /// spline, which grows without bound in the distance).
    pub fn bounded(self) -> bool {
        !matches!(self, RbfKind::ThinPlateSpline)
    }

    pub fn name(self) -> &'static str {
        match self {
            RbfKind::Gaussian => "gaussian",
            RbfKind::InverseQuadratic => "inverse_quadratic",
            RbfKind::InverseMultiquadric => "inverse_multiquadric",
            RbfKind::ThinPlateSpline => "thin_plate_spline",
        }
    }
}

impl std::str::FromStr for RbfKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RbfKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnsupportedKind(s.to_string()))
    }
}

impl std::fmt::Display for RbfKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Value and derivative groups of one radial basis function at one point.
///
/// With u_k = x_k − c_k, the spatial fields are per input axis k:
/// `d_dx[k]` = ∂f/∂x_k and `d2_dx2[k]` = ∂²f/∂x_k² (pure, no mixed terms).
/// The `d_db*` fields are ∂/∂b of the value and of those spatial fields.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfEvalRecord {
    pub value: f64,
    pub d_dx: Vec<f64>,
    pub d2_dx2: Vec<f64>,
    pub d_db: f64,
    pub d_db_of_dx: Vec<f64>,
    pub d_db_of_d2x2: Vec<f64>,
}

/// Derivatives of the radial profile with respect to s = ‖x − c‖² and b.
///
/// All six spatial/parameter derivative groups of the record reduce to these
/// via the chain rule: ∂f/∂x_k = 2·u_k·f_s and ∂²f/∂x_k² = 4·u_k²·f_ss + 2·f_s.
#[derive(Debug, Clone, Copy)]
struct Profile {
    f: f64,
    f_s: f64,
    f_ss: f64,
    f_b: f64,
    f_sb: f64,
    f_ssb: f64,
}

fn profile(kind: RbfKind, b: f64, s: f64) -> Profile {
    let b2 = b * b;
    match kind {
        RbfKind::Gaussian => {
            let f = (-b2 * s).exp();
            Profile {
                f,
                f_s: -b2 * f,
                f_ss: b2 * b2 * f,
                f_b: -2.0 * b * s * f,
                f_sb: 2.0 * b * (b2 * s - 1.0) * f,
                f_ssb: 2.0 * b2 * b * (2.0 - b2 * s) * f,
            }
        }
        RbfKind::InverseQuadratic => {
            let w = 1.0 + b2 * s;
            let w2 = w * w;
            let w3 = w2 * w;
            let w4 = w2 * w2;
            Profile {
                f: 1.0 / w,
                f_s: -b2 / w2,
                f_ss: 2.0 * b2 * b2 / w3,
                f_b: -2.0 * b * s / w2,
                f_sb: 2.0 * b * (b2 * s - 1.0) / w3,
                f_ssb: 4.0 * b2 * b * (2.0 - b2 * s) / w4,
            }
        }
        RbfKind::InverseMultiquadric => {
            let w = 1.0 + b2 * s;
            let w_12 = 1.0 / w.sqrt();
            let w_32 = w_12 / w;
            let w_52 = w_32 / w;
            let w_72 = w_52 / w;
            Profile {
                f: w_12,
                f_s: -0.5 * b2 * w_32,
                f_ss: 0.75 * b2 * b2 * w_52,
                f_b: -b * s * w_32,
                f_sb: b * (0.5 * b2 * s - 1.0) * w_52,
                f_ssb: 3.0 * b2 * b * (1.0 - 0.25 * b2 * s) * w_72,
            }
        }
        RbfKind::ThinPlateSpline => {
            // rho = sqrt(b²s); every derivative below vanishes in the limit
            // rho -> 0, so the singular 1/rho factors are guarded by an early
            // zero return.
            let rho = (b2 * s).sqrt();
            if rho == 0.0 {
                return Profile { f: 0.0, f_s: 0.0, f_ss: 0.0, f_b: 0.0, f_sb: 0.0, f_ssb: 0.0 };
            }
            let ln1p = rho.ln_1p();
            let rp = rho + 1.0;
            let rp2 = rp * rp;
            let rp3 = rp2 * rp;
            let f_s = b2 * (ln1p + 0.5 * rho / rp);
            Profile {
                f: rho * rho * ln1p,
                f_s,
                f_ss: b2 * b2 * (2.0 * rho + 3.0) / (4.0 * rho * rp2),
                f_b: (2.0 * rho * rho * ln1p + rho * rho * rho / rp) / b,
                f_sb: 2.0 * b * ln1p + 2.0 * b * rho / rp + 0.5 * b * rho / rp2,
                f_ssb: b2 * b * (4.0 * rho * rho + 11.0 * rho + 9.0) / (4.0 * rho * rp3),
            }
        }
    }
}

fn check_finite(label: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{label} is not finite: {v}")))
    }
}

/// Evaluate one radial basis function of the squared distance `sq_dist`.
pub fn rbf_eval(kind: RbfKind, b: f64, sq_dist: f64) -> Result<f64> {
    check_finite("shape parameter", b)?;
    check_finite("squared distance", sq_dist)?;
    if sq_dist < 0.0 {
        return Err(Error::InvalidInput(format!("squared distance is negative: {sq_dist}")));
    }
    Ok(profile(kind, b, sq_dist).f)
}

/// Evaluate one radial basis function together with all derivative groups at
/// the point `x` for a neuron centered at `c`.
pub fn rbf_derivs(kind: RbfKind, b: f64, x: &[f64], c: &[f64]) -> Result<RbfEvalRecord> {
    if x.len() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "point has dimension {} but center has {}",
            x.len(),
            c.len()
        )));
    }
    check_finite("shape parameter", b)?;
    for &v in x.iter().chain(c) {
        check_finite("coordinate", v)?;
    }
    let s = sq_dist(x, c);
    let p = profile(kind, b, s);
    let dim = x.len();
    let mut rec = RbfEvalRecord {
        value: p.f,
        d_dx: vec![0.0; dim],
        d2_dx2: vec![0.0; dim],
        d_db: p.f_b,
        d_db_of_dx: vec![0.0; dim],
        d_db_of_d2x2: vec![0.0; dim],
    };
    for k in 0..dim {
        let u = x[k] - c[k];
        let u2 = u * u;
        rec.d_dx[k] = 2.0 * u * p.f_s;
        rec.d2_dx2[k] = 4.0 * u2 * p.f_ss + 2.0 * p.f_s;
        rec.d_db_of_dx[k] = 2.0 * u * p.f_sb;
        rec.d_db_of_d2x2[k] = 4.0 * u2 * p.f_ssb + 2.0 * p.f_sb;
    }
    Ok(rec)
}

/// Half-width 3/|b| of the interval around a Gaussian neuron's center that
/// carries essentially all of its mass.
pub fn impact_radius(b: f64) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::DegenerateShape);
    }
    Ok(3.0 / b.abs())
}

/// Fraction of a Gaussian neuron's mass inside its impact interval: erf(3).
/// (Roughly 99.998%; often quoted as about 99.8%.)
pub fn impact_mass_fraction() -> f64 {
    libm::erf(3.0)
}

/// Number of uniformly spaced samples (spacing `dx`) that fall inside a
/// Gaussian neuron's impact interval: 2·floor(3/(|b|·dx)) + 1.
pub fn coverage_delta(b: f64, dx: f64) -> Result<usize> {
    if b == 0.0 {
        return Err(Error::DegenerateShape);
    }
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::InvalidInput(format!("sample spacing must be positive: {dx}")));
    }
    Ok(2 * (3.0 / (b.abs() * dx)).floor() as usize + 1)
}
