#![allow(dead_code)]

use std::sync::Arc;

use hwave_core::group_fourier::{
    LambdaGrid, LambdaGridSpec, PhysicalField, PhysicalGrid, PhysicalGridSpec, TauRule,
    TransformPlan,
};
use hwave_core::hermite_core::quadrature::AxisSpec;
use hwave_core::hermite_core::HermiteBasisSpec;

/// Fields with little mass at |λ| → 0, so that a fixed Hermite cutoff
/// captures essentially all of their Plancherel mass.
pub fn validation_fields(grid: &Arc<PhysicalGrid>) -> Vec<(&'static str, PhysicalField)> {
    let g = grid.clone();
    vec![
        (
            "gauss_r_hermite2_tau",
            PhysicalField::from_fn(g.clone(), |r, t| {
                (-r * r).exp() * (4.0 * t * t - 2.0) * (-t * t).exp()
            })
            .unwrap(),
        ),
        (
            "odd_in_tau",
            PhysicalField::from_fn(g.clone(), |r, t| {
                (-0.8 * r * r).exp() * t * (-t * t).exp()
            })
            .unwrap(),
        ),
        (
            "mixed_radial_shift",
            PhysicalField::from_fn(g.clone(), |r, t| {
                let a = (1.0 - r * r) * (-r * r).exp();
                let b = (4.0 * (t - 0.4).powi(2) - 2.0) * (-(t - 0.4).powi(2)).exp();
                a * b
            })
            .unwrap(),
        ),
    ]
}

pub fn suite_basis() -> HermiteBasisSpec {
    HermiteBasisSpec::for_degree(1, 64).unwrap()
}

pub fn suite_lambda(per_sign: usize) -> Arc<LambdaGrid> {
    Arc::new(
        LambdaGridSpec::Log {
            lambda_min: 1e-3,
            lambda_max: 30.0,
            per_sign,
        }
        .build(1)
        .unwrap(),
    )
}

pub fn suite_physical(r_pts: usize, tau_pts: usize) -> Arc<PhysicalGrid> {
    Arc::new(
        PhysicalGridSpec {
            n: 1,
            r: AxisSpec::uniform(6.0, r_pts),
            tau: AxisSpec::uniform(8.0, tau_pts),
        }
        .build()
        .unwrap(),
    )
}

pub fn suite_plan() -> TransformPlan {
    TransformPlan::new(
        suite_basis(),
        suite_lambda(128),
        suite_physical(201, 201),
        TauRule::Pointwise,
    )
    .unwrap()
}

pub fn rel_l2(a: &PhysicalField, b: &PhysicalField) -> f64 {
    let d = PhysicalField {
        grid: a.grid.clone(),
        values: a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect(),
    };
    d.l2_norm() / b.l2_norm()
}

/// `f` restricted to the nodes of `sub`, which must be a subset of f's nodes.
pub fn restrict(f: &PhysicalField, sub: &Arc<PhysicalGrid>) -> PhysicalField {
    let find = |fine: &[f64], x: f64| {
        fine.iter()
            .position(|y| (y - x).abs() < 1e-12 * (1.0 + x.abs()))
            .expect("sub-grid node missing from the fine grid")
    };
    let nt = f.grid.tau_nodes().len();
    let ri: Vec<usize> = sub.r.nodes.iter().map(|x| find(&f.grid.r.nodes, *x)).collect();
    let ti: Vec<usize> = sub.tau_nodes().iter().map(|x| find(f.grid.tau_nodes(), *x)).collect();
    let values = ri
        .iter()
        .flat_map(|i| ti.iter().map(move |l| f.values[i * nt + l]))
        .collect();
    PhysicalField {
        grid: sub.clone(),
        values,
    }
}
