//! Physics-informed radial basis networks (PIRBN) and a tanh-PINN baseline for
//! solving nonlinear PDEs by collocation, with exact neural-tangent-kernel
//! diagnostics and closed-form oracles for every benchmark problem.
//!
//! The crate is organised bottom-up:
//!
//! - [`rbf`]: radial basis functions and their closed-form derivatives,
//! - [`model`]: the PIRBN and FNN networks with exact spatial derivatives and
//!   parameter Jacobian rows,
//! - [`oracle`]: analytical solutions and tailored forcings for the benchmarks,
//! - [`problems`]: benchmark PDE definitions and residual/Jacobian assembly,
//! - [`ntk`]: empirical and theoretical neural tangent kernels plus spectral
//!   diagnostics,
//! - [`train`]: loss, exact gradients, Adam/gradient-descent loops, adaptive
//!   loss weights.
//!
//! All arithmetic is 64-bit; every run is deterministic under its seed.

pub mod error;
pub mod fd;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod ntk;
pub mod oracle;
pub mod problems;
pub mod rbf;
pub mod train;

pub use error::{Error, Result};
