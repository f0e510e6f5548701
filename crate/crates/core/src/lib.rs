//! Spectral simulation of the damped wave equation u_tt − Lu + u_t = |u|^p
//! on the Heisenberg group H^n, restricted to z-radial fields.

pub mod analysis_lab;
pub mod error;
pub mod experiment_harness;
pub mod group_fourier;
pub mod hermite_core;
pub mod linear_propagator;
pub mod nonlinear_solver;
pub mod spectral_field;

pub use error::{Error, Result};
