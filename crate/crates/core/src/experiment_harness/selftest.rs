//! Quick consistency checks run by `hwave selftest`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis_lab::{blowup_sign_exponent, critical_exponent, gamma_tilde};
use crate::error::Result;
use crate::group_fourier::{
    plancherel_l2_norm, LambdaGridSpec, PhysicalField, PhysicalGridSpec, TauRule, TransformPlan,
};
use crate::hermite_core::quadrature::AxisSpec;
use crate::hermite_core::{orthonormality_defect, HermiteBasisSpec};
use crate::linear_propagator::{mode_multipliers, mode_ode_reference};
use crate::nonlinear_solver::{ode_model_trajectory, BlowupPolicy, DtPolicy};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        }
    }
}

fn exponents() -> CheckOutcome {
    let mut worst = (critical_exponent(4.0, 1.0) - 5.0 / 3.0).abs();
    worst = worst.max((gamma_tilde(4.0) - (5f64.sqrt() - 1.0)).abs());
    worst = worst.max((gamma_tilde(6.0) - (33f64.sqrt() - 3.0) / 2.0).abs());
    for q in [4.0, 6.0, 8.0, 10.0] {
        for i in 0..25 {
            let g = q / 2.0 * (i as f64 + 0.5) / 25.0;
            let v = blowup_sign_exponent(q, g, critical_exponent(q, g));
            worst = worst.max(v.abs());
        }
    }
    CheckOutcome::below("exponent formulas", worst, 1e-10)
}

fn multipliers(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..60 {
        let t = rng.gen_range(0.0..10.0);
        let b2 = if i % 4 == 0 {
            0.25 + rng.gen_range(-1e-3..1e-3)
        } else {
            10f64.powf(rng.gen_range(-3.0..2.0))
        };
        let m = mode_multipliers(t, b2);
        let r = mode_ode_reference(t, b2, 1e-12);
        let scale = r[0].hypot(r[1]);
        worst = worst.max((m.a0.re - r[0]).hypot(m.a1.re - r[1]) / scale);
    }
    CheckOutcome::below("multipliers vs ODE reference", worst, 1e-8)
}

fn hermite() -> Result<CheckOutcome> {
    let spec = HermiteBasisSpec::new(1, 16, 12.0, 256)?;
    Ok(CheckOutcome::below("Hermite orthonormality", orthonormality_defect(&spec), 1e-8))
}

fn parseval() -> Result<Vec<CheckOutcome>> {
    let basis = HermiteBasisSpec::for_degree(1, 32)?;
    let lgrid = LambdaGridSpec::Log {
        lambda_min: 1e-3,
        lambda_max: 30.0,
        per_sign: 96,
    }
    .build(1)?;
    let pgrid = PhysicalGridSpec {
        n: 1,
        r: AxisSpec::uniform(6.0, 121),
        tau: AxisSpec::uniform(8.0, 161),
    }
    .build()?;
    let plan = TransformPlan::new(basis, Arc::new(lgrid), Arc::new(pgrid), TauRule::Pointwise)?;
    let f = PhysicalField::from_fn(plan.pgrid.clone(), |r, t| {
        (-r * r).exp() * (4.0 * t * t - 2.0) * (-t * t).exp()
    })?;
    let c = plan.forward(&f)?;
    let norm = f.l2_norm();
    let back = plan.inverse(&c)?;
    let diff = PhysicalField {
        grid: f.grid.clone(),
        values: back.values.iter().zip(&f.values).map(|(a, b)| a - b).collect(),
    };
    Ok(vec![
        CheckOutcome::below("Parseval", (plancherel_l2_norm(&c) - norm).abs() / norm, 1e-3),
        CheckOutcome::below("forward/inverse roundtrip", diff.l2_norm() / norm, 1e-3),
    ])
}

fn blowup_model() -> CheckOutcome {
    // v' = v², v(0) = 1 blows up at t = 1.
    let err = ode_model_trajectory(2.0, 1.0, &DtPolicy::default(), &BlowupPolicy::default(), 5.0)
        .ok()
        .and_then(|rec| rec.lifespan_estimate)
        .map_or(f64::INFINITY, |t| (t - 1.0).abs());
    CheckOutcome::below("blow-up detector on v' = v^2", err, 0.02)
}

/// Runs the quick checks; a check that errors counts as failed.
pub fn run_selftest(seed: u64) -> Vec<CheckOutcome> {
    let mut out = vec![exponents(), multipliers(seed)];
    match hermite() {
        Ok(c) => out.push(c),
        Err(_) => out.push(CheckOutcome::below("Hermite orthonormality", f64::NAN, 1e-8)),
    }
    match parseval() {
        Ok(c) => out.extend(c),
        Err(_) => out.push(CheckOutcome::below("Parseval", f64::NAN, 1e-3)),
    }
    out.push(blowup_model());
    out
}
