//! Group Fourier transform on H^n restricted to z-radial functions.

pub mod coefficient;
pub mod field;
pub mod grid;
pub mod oracle;
pub mod plan;
pub mod snapshot;

pub use coefficient::{matrix_coefficient, matrix_coefficient_multi, GroupPoint};
pub use field::SpectralField;
pub use grid::{LambdaGrid, LambdaGridSpec, PhysicalField, PhysicalGrid, PhysicalGridSpec};
pub use plan::{TauRule, TransformPlan};

use crate::error::Result;

pub fn forward_transform(plan: &TransformPlan, f: &PhysicalField) -> Result<SpectralField> {
    plan.forward(f)
}

pub fn inverse_transform(plan: &TransformPlan, f: &SpectralField) -> Result<PhysicalField> {
    plan.inverse(f)
}

/// sqrt(Σ_j w_j Σ_k d_k |c[k][j]|²).
pub fn plancherel_l2_norm(f: &SpectralField) -> f64 {
    crate::spectral_field::sobolev_norm(f, 0.0)
}
