use hwave_core::analysis_lab::{
    blowup_sign_exponent, critical_exponent, data_lower_bound_check, gamma_tilde,
    global_existence_threshold, gn_ratio, gn_theta, hls_ratio, lifespan_exponent, lower_bound_fit,
    random_family, sublaplacian_fd, test_function_eval, BumpSpec,
};
use hwave_core::experiment_harness::lab_plan;
use hwave_core::group_fourier::{GroupPoint, PhysicalField};
use hwave_core::spectral_field::DataProfileSpec;
use proptest::prelude::*;

#[test]
fn critical_exponent_examples() {
    assert!((critical_exponent(4.0, 1.0) - 5.0 / 3.0).abs() < 1e-15);
    assert_eq!(critical_exponent(4.0, 0.0), 2.0);
    let mut prev = f64::INFINITY;
    for q in (4..400).step_by(2) {
        let v = critical_exponent(q as f64, 1.0);
        assert!(v < prev && v > 1.0);
        prev = v;
    }
}

#[test]
fn gamma_tilde_examples() {
    assert!((gamma_tilde(4.0) - (5f64.sqrt() - 1.0)).abs() < 1e-12);
    assert!((gamma_tilde(6.0) - (33f64.sqrt() - 3.0) / 2.0).abs() < 1e-12);
    for q in (4..=100).step_by(2) {
        let q = q as f64;
        let g = gamma_tilde(q);
        assert!((2.0 * g * g + q * g - 2.0 * q).abs() < 1e-12 * q);
        assert!(g < 2.0);
    }
}

#[test]
fn lifespan_exponent_examples() {
    assert!((lifespan_exponent(4.0, 0.5, 1.5).unwrap() + 4.0 / 3.0).abs() < 1e-12);
    assert!((lifespan_exponent(4.0, 2.0, 1.4).unwrap() + 2.0).abs() < 1e-12);
    let pc = critical_exponent(4.0, 1.0);
    assert!(lifespan_exponent(4.0, 1.0, pc).is_err());
    assert!(lifespan_exponent(4.0, 1.0, 2.0).is_err());
    assert!(lifespan_exponent(4.0, 1.0, pc - 1e-6).unwrap() < -1e4);
}

#[test]
fn sign_exponent_examples() {
    assert!((blowup_sign_exponent(4.0, 1.0, 1.5) + 1.0).abs() < 1e-12);
    assert!(blowup_sign_exponent(4.0, 1.0, 1.9) > 0.0);
}

#[test]
fn gn_theta_examples() {
    assert_eq!(gn_theta(4.0, 1.0, 2.0, 4.0).unwrap(), (1.0, true));
    let (t, ok) = gn_theta(2.0, 0.5, 2.0, 6.0).unwrap();
    assert!(t.abs() < 1e-15 && ok);
    assert!(!gn_theta(5.0, 1.0, 2.0, 4.0).unwrap().1);
    // s/Q + 1/2 = 1/r
    assert!(gn_theta(3.0, 1.0, 4.0 / 3.0, 4.0).is_err());
}

proptest! {
    #[test]
    fn threshold_coincidence(qi in 2usize..5, g in 0.001f64..0.999, p in 1.001f64..3.0) {
        let q = (2 * qi) as f64;
        let gamma = g * q / 2.0;
        let e = blowup_sign_exponent(q, gamma, p);
        let pc = critical_exponent(q, gamma);
        prop_assert!(blowup_sign_exponent(q, gamma, pc).abs() < 1e-10);
        if (p - pc).abs() > 1e-9 {
            prop_assert_eq!(e < 0.0, p < pc);
        }
    }

    #[test]
    fn gamma_tilde_switches_the_binding_constraint(qi in 2usize..10, g in 0.0f64..1.0) {
        let q = (2 * qi) as f64;
        let gt = gamma_tilde(q);
        let gamma = g * q / 2.0;
        prop_assume!((gamma - gt).abs() > 1e-9);
        let thr = global_existence_threshold(q, gamma);
        if gamma < gt {
            prop_assert_eq!(thr, critical_exponent(q, gamma));
        } else {
            prop_assert_eq!(thr, 1.0 + 2.0 * gamma / q);
        }
    }

    #[test]
    fn gn_theta_matches_stated_ranges(qi in 2usize..6, s in 0.05f64..1.0, r in 1.05f64..3.0, qe in 1.5f64..12.0) {
        let q = (2 * qi) as f64;
        prop_assume!((s / q + 0.5 - 1.0 / r).abs() > 1e-6);
        let (theta, ok) = gn_theta(qe, s, r, q).unwrap();
        prop_assert!((theta - (0.5 - 1.0 / qe) / (s / q + 0.5 - 1.0 / r)).abs() < 1e-12);
        let top = if q > s * r { r * q / (q - s * r) } else { f64::INFINITY };
        let margin = 1e-9;
        let clear_in = r < q / s - margin && qe >= 2.0 + margin && qe <= top * (1.0 - margin)
            && theta >= margin && theta <= 1.0 - margin;
        let clear_out = r > q / s + margin || qe < 2.0 - margin || qe > top * (1.0 + margin)
            || theta < -margin || theta > 1.0 + margin;
        if clear_in {
            prop_assert!(ok);
        }
        if clear_out {
            prop_assert!(!ok);
        }
    }
}

#[test]
fn test_function_plateau_and_exterior() {
    let spec = BumpSpec::new(8.0).unwrap();
    let inside = GroupPoint::new(vec![3.0], vec![-3.5], 15.0).unwrap();
    let v = test_function_eval(&spec, 10.0, &inside);
    assert_eq!((v.phi, v.dt_phi, v.dtt_phi, v.l_phi), (1.0, 0.0, 0.0, 0.0));
    for g in [
        GroupPoint::new(vec![8.5], vec![0.0], 0.0).unwrap(),
        GroupPoint::new(vec![0.0], vec![0.0], 70.0).unwrap(),
    ] {
        let v = test_function_eval(&spec, 0.0, &g);
        assert_eq!((v.phi, v.l_phi), (0.0, 0.0));
    }
    let v = test_function_eval(&spec, 65.0, &inside);
    assert_eq!((v.phi, v.dt_phi), (0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l_phi_matches_vector_field_differences(
        x in 0.25f64..1.05, y in 0.25f64..1.05, ang in 0.0f64..6.3,
        tau in 0.1f64..1.05, t in 0.0f64..0.9, sgn in prop::bool::ANY,
    ) {
        let r = 3.0;
        let spec = BumpSpec::new(r).unwrap();
        let (sx, sy) = (if sgn { 1.0 } else { -1.0 }, ang.cos().signum());
        let g = GroupPoint::new(vec![sx * x * r], vec![sy * y * r], ang.sin() * tau * r * r).unwrap();
        let t = t * r * r;
        let exact = test_function_eval(&spec, t, &g).l_phi;
        let fd = sublaplacian_fd(|p| test_function_eval(&spec, t, p).phi, &g, 2e-3 * r);
        let scale = exact.abs().max(1.0 / (r * r));
        prop_assert!((exact - fd).abs() <= 1e-4 * scale, "{} vs {}", exact, fd);
    }

    #[test]
    fn l_phi_matches_differences_in_two_dimensions(
        a in prop::array::uniform4(-1.05f64..1.05), tau in -1.05f64..1.05,
    ) {
        let r = 2.5;
        let spec = BumpSpec::new(r).unwrap();
        let g = GroupPoint::new(vec![a[0] * r, a[1] * r], vec![a[2] * r, a[3] * r], tau * r * r).unwrap();
        let exact = test_function_eval(&spec, 0.0, &g).l_phi;
        let fd = sublaplacian_fd(|p| test_function_eval(&spec, 0.0, p).phi, &g, 2e-3 * r);
        let scale = exact.abs().max(1.0 / (r * r));
        prop_assert!((exact - fd).abs() <= 1e-4 * scale, "{} vs {}", exact, fd);
    }
}

#[test]
fn bump_derivatives_are_continuous_at_the_layer_edges() {
    let spec = BumpSpec::new(2.0).unwrap();
    for b in [spec.alpha, spec.beta] {
        for edge in [b.plateau, b.support] {
            let d = 1e-9;
            let (l, r) = (b.eval(edge - d), b.eval(edge + d));
            assert!((l.0 - r.0).abs() < 1e-6);
            assert!((l.1 - r.1).abs() < 1e-6);
            assert!((l.2 - r.2).abs() < 1e-6);
        }
    }
}

#[test]
fn bump_power_constants_are_finite() {
    let spec = BumpSpec::new(2.0).unwrap();
    for p in [1.2, 1.5, 2.0, 3.0] {
        let c = spec.beta.power_constant(p, 4000);
        assert!(c.is_finite() && c > 0.0, "p {p}: {c}");
    }
}

#[test]
fn lower_bound_holds_with_the_expected_power() {
    for gamma in [0.5, 1.0] {
        let profile = DataProfileSpec::new(1.0, 4, gamma).unwrap();
        let checks: Vec<_> = [10.0, 50.0, 200.0]
            .iter()
            .map(|r| data_lower_bound_check(&profile, &BumpSpec::new(*r).unwrap()).unwrap())
            .collect();
        for c in &checks {
            assert!(c.integral >= c.bound, "γ {gamma} R {}: {} < {}", c.r, c.integral, c.bound);
        }
        let fit = lower_bound_fit(&checks).unwrap();
        let target = 2.0 - gamma;
        assert!((fit.power_slope - target).abs() < 0.15, "γ {gamma}: {}", fit.power_slope);
    }
}

#[test]
fn lower_bound_is_linear_in_c0() {
    let bump = BumpSpec::new(20.0).unwrap();
    let a = data_lower_bound_check(&DataProfileSpec::new(0.7, 4, 1.0).unwrap(), &bump).unwrap();
    let b = data_lower_bound_check(&DataProfileSpec::new(1.4, 4, 1.0).unwrap(), &bump).unwrap();
    assert!((b.integral / a.integral - 2.0).abs() < 1e-12);
    assert!(BumpSpec::new(1.0).is_err());
}

#[test]
fn inequality_ratios_are_scale_invariant() {
    let plan = lab_plan(1, 0).unwrap();
    for s in random_family(7, 5) {
        let f = s.sample(plan.pgrid.clone()).unwrap();
        let a = 4.0 * (1.0 / 1.5 - 0.5);
        let g0 = gn_ratio(&plan, &f, 4.0, 1.0).unwrap();
        let h0 = hls_ratio(&plan, &f, a, 1.5).unwrap();
        for c in [1e-3, 0.37, -2.0, 1e4] {
            let scaled = PhysicalField {
                grid: f.grid.clone(),
                values: f.values.iter().map(|v| c * v).collect(),
            };
            let g = gn_ratio(&plan, &scaled, 4.0, 1.0).unwrap();
            let h = hls_ratio(&plan, &scaled, a, 1.5).unwrap();
            assert!((g / g0 - 1.0).abs() < 1e-8 && (h / h0 - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn inequality_ratio_guards() {
    let plan = lab_plan(1, 0).unwrap();
    let zero = PhysicalField::from_fn(plan.pgrid.clone(), |_, _| 0.0).unwrap();
    assert!(gn_ratio(&plan, &zero, 4.0, 1.0).is_err());
    assert!(hls_ratio(&plan, &zero, 4.0 * (1.0 / 1.5 - 0.5), 1.5).is_err());
    let f = random_family(1, 1)[0].sample(plan.pgrid.clone()).unwrap();
    assert!(gn_ratio(&plan, &f, 5.0, 1.0).is_err());
    assert!(hls_ratio(&plan, &f, 0.3, 1.5).is_err());
}
