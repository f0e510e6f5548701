//! Reference values for the multipliers by direct integration of
//! v'' + v' + β²v = 0 with an adaptive Dormand–Prince 5(4) pair.

type State = [f64; 4];

fn rhs(b2: f64, y: &State) -> State {
    // (A0, A0', A1, A1')
    [y[1], -y[1] - b2 * y[0], y[3], -y[3] - b2 * y[2]]
}

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// (A0, A1, A0', A1') at time t, integrated with relative tolerance `rtol`.
pub fn mode_ode_reference(t: f64, beta_sq: f64, rtol: f64) -> [f64; 4] {
    let mut y: State = [1.0, 0.0, 0.0, 1.0];
    if t <= 0.0 {
        return [1.0, 0.0, 0.0, 1.0];
    }
    let omega = beta_sq.abs().sqrt().max(1.0);
    let mut h = (0.01 / omega).min(t);
    let mut s = 0.0;
    let mut k1 = rhs(beta_sq, &y);
    while s < t {
        if s + h > t {
            h = t - s;
        }
        let k2 = rhs(beta_sq, &axpy(&y, &[(0.2, &k1)], h));
        let k3 = rhs(beta_sq, &axpy(&y, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)], h));
        let k4 = rhs(
            beta_sq,
            &axpy(&y, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)], h),
        );
        let k5 = rhs(
            beta_sq,
            &axpy(
                &y,
                &[
                    (19372.0 / 6561.0, &k1),
                    (-25360.0 / 2187.0, &k2),
                    (64448.0 / 6561.0, &k3),
                    (-212.0 / 729.0, &k4),
                ],
                h,
            ),
        );
        let k6 = rhs(
            beta_sq,
            &axpy(
                &y,
                &[
                    (9017.0 / 3168.0, &k1),
                    (-355.0 / 33.0, &k2),
                    (46732.0 / 5247.0, &k3),
                    (49.0 / 176.0, &k4),
                    (-5103.0 / 18656.0, &k5),
                ],
                h,
            ),
        );
        let y5 = axpy(
            &y,
            &[
                (35.0 / 384.0, &k1),
                (500.0 / 1113.0, &k3),
                (125.0 / 192.0, &k4),
                (-2187.0 / 6784.0, &k5),
                (11.0 / 84.0, &k6),
            ],
            h,
        );
        let k7 = rhs(beta_sq, &y5);
        let y4 = axpy(
            &y,
            &[
                (5179.0 / 57600.0, &k1),
                (7571.0 / 16695.0, &k3),
                (393.0 / 640.0, &k4),
                (-92097.0 / 339200.0, &k5),
                (187.0 / 2100.0, &k6),
                (1.0 / 40.0, &k7),
            ],
            h,
        );
        // Scale by the solution pair's size so that the control is relative
        // even where one component passes through zero.
        let scale = (y5[0].hypot(y5[2]) + y5[1].hypot(y5[3]) / omega).max(1e-300);
        let err = (0..4)
            .map(|i| {
                let w = if i % 2 == 0 { 1.0 } else { 1.0 / omega };
                (w * (y5[i] - y4[i])).abs()
            })
            .fold(0.0, f64::max)
            / (rtol * scale);
        if err <= 1.0 {
            s += h;
            y = y5;
            k1 = k7;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    [y[0], y[2], y[1], y[3]]
}
