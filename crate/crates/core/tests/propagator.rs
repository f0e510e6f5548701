use std::sync::Arc;

use hwave_core::group_fourier::LambdaGridSpec;
use hwave_core::hermite_core::{hermite_eigenvalue, HermiteBasisSpec};
use hwave_core::linear_propagator::{
    characteristic_roots, decay_experiment, evolve_linear, mode_multipliers, mode_ode_reference,
    multipliers_with_derivatives, CauchyData, DecaySpec,
};
use hwave_core::spectral_field::{synthesize_band_field, AmplitudeProfile};
use num_complex::Complex64;
use proptest::prelude::*;

fn oracle_rel(t: f64, b2: f64) -> f64 {
    let m = mode_multipliers(t, b2);
    let r = mode_ode_reference(t, b2, 1e-12);
    (m.a0.re - r[0]).hypot(m.a1.re - r[1]) / r[0].hypot(r[1])
}

#[test]
fn root_examples() {
    let r = characteristic_roots(0.0);
    assert_eq!((r.m1, r.m2), (Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)));
    let r = characteristic_roots(0.25);
    assert!((r.m1.re + 0.5).abs() < 1e-15 && (r.m2.re + 0.5).abs() < 1e-15);
    let r = characteristic_roots(1.0);
    assert!((r.m1 - Complex64::new(-0.5, -0.8660254037844386)).norm() < 1e-15);
    assert!((r.m2 - Complex64::new(-0.5, 0.8660254037844386)).norm() < 1e-15);
}

#[test]
fn multiplier_examples() {
    let m = mode_multipliers(2.0, 0.0);
    assert!((m.a0.re - 1.0).abs() < 1e-15);
    assert!((m.a1.re - 0.8646647167633873).abs() < 1e-12);
    let m = mode_multipliers(1.0, 0.25);
    assert!((m.a0.re - 1.5 * (-0.5f64).exp()).abs() < 1e-12);
    assert!((m.a1.re - (-0.5f64).exp()).abs() < 1e-12);
    assert!(oracle_rel(3.0, 2.0) < 1e-8);
    assert!(oracle_rel(1.0, 0.25) < 1e-8);
}

#[test]
fn degenerate_continuity() {
    for side in [-1.0, 1.0] {
        let b2 = 0.25 + side * 1e-5;
        let worst = (0..=500)
            .map(|i| {
                let t = 0.1 * i as f64;
                let a = mode_multipliers(t, b2);
                let b = mode_multipliers(t, 0.25);
                ((a.a0 - b.a0).norm()).max((a.a1 - b.a1).norm())
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst:.3e}");
    }
}

#[test]
fn initial_velocity_slope() {
    for b2 in [0.0, 0.01, 0.25, 1.0, 100.0] {
        let h = 1e-7;
        let d = mode_multipliers(h, b2).a1.re / h;
        assert!((d - 1.0).abs() < 1e-6, "β² = {b2}: {d}");
    }
}

proptest! {
    #[test]
    fn initial_conditions(b2 in 0.0f64..1e3) {
        let m = mode_multipliers(0.0, b2);
        prop_assert_eq!(m.a0, Complex64::new(1.0, 0.0));
        prop_assert_eq!(m.a1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vieta(b2 in 0.0f64..1e3) {
        let r = characteristic_roots(b2);
        prop_assert!((r.m1 + r.m2 + 1.0).norm() < 1e-12);
        prop_assert!((r.m1 * r.m2 - b2).norm() < 1e-12 * b2.max(1.0));
        prop_assert!(r.m1.re <= r.m2.re);
        if b2 > 0.0 {
            prop_assert!(r.m2.re < 0.0);
        }
    }

    #[test]
    fn small_beta_brackets(beta in 1e-4f64..0.5) {
        let b2 = beta * beta;
        let r = characteristic_roots(b2);
        prop_assert!(r.m2.re >= -2.0 * b2 - 1e-15 && r.m2.re <= -b2 + 1e-15);
        prop_assert!(r.m1.re >= -1.0 - 1e-15 && r.m1.re <= -0.5 + 1e-15);
    }

    #[test]
    fn large_beta_envelope(b2 in 1.0f64..1e3, t in 0.0f64..50.0) {
        let m = mode_multipliers(t, b2);
        let beta = b2.sqrt();
        let root = (4.0 * b2 - 1.0).sqrt();
        let env = (-0.5 * t).exp();
        prop_assert!(m.a0.norm() <= 2.0 * beta / root * env * (1.0 + 1e-12));
        prop_assert!(m.a1.norm() <= 2.0 / root * env * (1.0 + 1e-12));
    }

    #[test]
    fn energy_is_non_increasing(b2 in 0.0f64..100.0, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let energy = |t: f64| {
            let w = multipliers_with_derivatives(t, b2);
            let x = w.a0 * u + w.a1 * v;
            let dx = w.da0 * u + w.da1 * v;
            dx * dx + b2 * x * x
        };
        let mut prev = energy(0.0);
        for i in 1..200 {
            let e = energy(0.05 * i as f64);
            prop_assert!(e <= prev * (1.0 + 1e-12) + 1e-300);
            prev = e;
        }
    }

    #[test]
    fn matches_ode_oracle(t in 0.0f64..50.0, lb2 in -4.0f64..3.0) {
        let b2 = 10f64.powf(lb2);
        prop_assert!(oracle_rel(t, b2) < 1e-8);
    }

    #[test]
    fn matches_ode_oracle_near_degenerate(t in 0.0f64..50.0, d in -1e-3f64..1e-3) {
        prop_assert!(oracle_rel(t, 0.25 + d) < 1e-8);
    }
}

fn small_field(seed: u64) -> (HermiteBasisSpec, hwave_core::group_fourier::SpectralField) {
    let basis = HermiteBasisSpec::for_degree(1, 4).unwrap();
    let grid = Arc::new(
        LambdaGridSpec::Log {
            lambda_min: 0.01,
            lambda_max: 5.0,
            per_sign: 12,
        }
        .build(1)
        .unwrap(),
    );
    let exponent = 0.1 * (seed % 7) as f64;
    let f = synthesize_band_field(
        &basis,
        grid,
        &[0, 1, 2, 3, 4],
        (0.0, 5.0),
        &AmplitudeProfile::Power { exponent },
    )
    .unwrap();
    (basis, f)
}

#[test]
fn evolve_at_zero_is_identity() {
    let (_, f) = small_field(1);
    let data = CauchyData::new(f.clone(), f.scaled(0.5), 1.0).unwrap();
    assert_eq!(evolve_linear(&data, 0.0).coeffs, f.coeffs);
}

#[test]
fn evolve_matches_mode_oracle() {
    let (basis, u0) = small_field(3);
    let (_, u1) = small_field(5);
    let data = CauchyData::new(u0.clone(), u1.clone(), 0.7).unwrap();
    let t = 5.0;
    let u = evolve_linear(&data, t);
    let nodes = u.grid.nodes();
    for k in 0..basis.degrees() {
        let mu = hermite_eigenvalue(k, 1) as f64;
        for (j, l) in nodes.iter().enumerate() {
            let r = mode_ode_reference(t, l.abs() * mu, 1e-12);
            let want = (u0.get(k, j) * r[0] + u1.get(k, j) * r[1]) * 0.7;
            let scale = (u0.get(k, j).norm() + u1.get(k, j).norm()) * r[0].hypot(r[1]);
            assert!((u.get(k, j) - want).norm() <= 1e-8 * scale, "k {k} j {j}");
        }
    }
    // reality symmetry survives
    for m in 0..u.grid.half_len() {
        for k in 0..basis.degrees() {
            assert_eq!(u.get(k, u.grid.j_pos(m)), u.get(k, u.grid.j_neg(m)).conj());
        }
    }
}

#[test]
fn decay_examples() {
    let fit = decay_experiment(&DecaySpec::new(1, 0.0, 1.0)).unwrap();
    assert!((fit.slope + 0.5).abs() < 0.1, "{}", fit.slope);
    let fit = decay_experiment(&DecaySpec::new(1, 1.0, 0.5)).unwrap();
    assert!((fit.slope + 0.75).abs() < 0.1, "{}", fit.slope);
    assert!(fit.refinement_shift < 0.02);
    assert!(fit.times.len() == 64 && fit.fit_window == (10.0, 1e3));
}

#[test]
fn decay_without_negative_regularity_does_not_decay() {
    // The data density is nearly log-flat at λ = 0, so the grid has to
    // reach far below 1/t to hold the L² mass.
    let mut spec = DecaySpec::new(1, 0.0, 0.0);
    spec.lambda_grid = LambdaGridSpec::Log {
        lambda_min: 1e-30,
        lambda_max: 10.0,
        per_sign: 320,
    };
    let fit = decay_experiment(&spec).unwrap();
    assert!(fit.slope.abs() < 0.05, "{}", fit.slope);
}

#[test]
fn decay_preconditions() {
    assert!(decay_experiment(&DecaySpec::new(1, -0.5, 1.0)).unwrap_err().is_validation());
    assert!(decay_experiment(&DecaySpec::new(1, 0.5, -1.0)).is_err());
}
