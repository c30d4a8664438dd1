//! Spiked PT-symmetric oscillators on tobogganic complex contours.
//!
//! Bound states are found by two-sided shooting along spirals that wind
//! around the branch point at the origin; scattering is set up on
//! anti-Stokes contours. Exact harmonic-oscillator solutions, the
//! power-law change of variables and the supersymmetric partner
//! construction serve as independent checks.

pub mod config;
pub mod dopri;
pub mod error;
pub mod liouville;
pub mod potential;
pub mod propagate;
pub mod rational;
pub mod riemann_path;
pub mod scattering;
pub mod specfun;
pub mod spectrum;
pub mod susy;

pub use error::{Error, Result};
pub use num_complex::Complex64;
