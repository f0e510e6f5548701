//! Grids and initial data for nonlinear runs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_fourier::{LambdaGridSpec, PhysicalField, PhysicalGridSpec, TauRule, TransformPlan};
use crate::hermite_core::quadrature::AxisSpec;
use crate::hermite_core::HermiteBasisSpec;
use crate::linear_propagator::CauchyData;
use crate::spectral_field::{smooth_step, DataProfileSpec};

/// Everything that fixes the discretization of a nonlinear run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearGridSpec {
    pub k_max: usize,
    pub lambda: LambdaGridSpec,
    pub physical: PhysicalGridSpec,
    /// Data are tapered smoothly to zero between this fraction of each box
    /// extent and the box edge.
    pub taper_start: f64,
    pub rule: TauRule,
}

impl NonlinearGridSpec {
    /// Stretched box [0, r_max] × [−τ_max, τ_max] with a log-to-uniform λ grid
    /// whose uniform spacing resolves the τ box without wrap-around.
    pub fn for_box(n: usize, k_max: usize, r_max: f64, tau_max: f64, lambda_max: f64) -> Self {
        let spacing = std::f64::consts::PI / tau_max;
        Self {
            k_max,
            lambda: LambdaGridSpec::LogLinear {
                lambda_min: 0.02 * spacing,
                lambda_max,
                spacing,
                log_step: 0.25,
            },
            physical: PhysicalGridSpec {
                n,
                r: AxisSpec::stretched(r_max, odd(12.0 * (r_max / 0.5).asinh()), 0.5),
                tau: AxisSpec::stretched(tau_max, odd(12.0 * (tau_max / 0.5).asinh()), 0.5),
            },
            taper_start: 0.6,
            rule: TauRule::Filon,
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            k_max: 2 * self.k_max,
            lambda: self.lambda.refined(),
            physical: self.physical.refined(),
            ..*self
        }
    }

    pub fn plan(&self) -> Result<TransformPlan> {
        let n = self.physical.n;
        let basis = HermiteBasisSpec::for_degree(n, self.k_max)?;
        let lgrid = Arc::new(self.lambda.build(n)?);
        let pgrid = Arc::new(self.physical.build()?);
        TransformPlan::new(basis, lgrid, pgrid, self.rule)
    }
}

fn odd(x: f64) -> usize {
    let k = x.ceil() as usize;
    k + 1 - k % 2
}

fn taper(x: f64, start: f64) -> f64 {
    1.0 - smooth_step((x - start) / (1.0 - start)).0
}

/// Tapered profile data u₀ = u₁ scaled by ε, and the plan they live on.
pub fn blowup_data(
    profile: &DataProfileSpec,
    grids: &NonlinearGridSpec,
    eps: f64,
) -> Result<(Arc<TransformPlan>, CauchyData)> {
    profile.validate()?;
    if profile.q != 2 * grids.physical.n + 2 {
        return Err(Error::invalid("profile Q does not match the grid's n"));
    }
    if !(grids.taper_start > 0.0 && grids.taper_start < 1.0) {
        return Err(Error::invalid("taper_start must lie in (0, 1)"));
    }
    let plan = Arc::new(grids.plan()?);
    let rm = grids.physical.r.max;
    let tm = grids.physical.tau.max;
    let a = grids.taper_start;
    let f = PhysicalField::from_fn(plan.pgrid.clone(), |r, t| {
        profile.value(r, t) * taper(r / rm, a) * taper(t.abs() / tm, a)
    })?;
    let u0 = plan.forward(&f)?;
    let data = CauchyData::new(u0.clone(), u0, eps)?;
    Ok((plan, data))
}
