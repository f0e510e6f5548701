//! Exponential-integrator weights W_j(h) = ∫₀^h A1(τ)(h − τ)^j dτ.

use crate::hermite_core::quadrature::gauss_legendre;

use super::{multipliers_with_derivatives, Multipliers};

/// Multipliers at the step end plus the moments W0, W1, W2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepWeights {
    pub m: Multipliers,
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

const GL_POINTS: usize = 24;
const PANEL: f64 = 2.0;

thread_local! {
    static GL: (Vec<f64>, Vec<f64>) = gauss_legendre(GL_POINTS);
}

impl StepWeights {
    pub fn new(h: f64, beta_sq: f64) -> Self {
        if beta_sq * h * h >= 64.0 {
            Self::from_identities(h, beta_sq)
        } else {
            Self::from_quadrature(h, beta_sq)
        }
    }

    // moments of the ODE integrated against (h − τ)^j; no cancellation
    // once β²h² is large
    fn from_identities(h: f64, beta_sq: f64) -> Self {
        let m = multipliers_with_derivatives(h, beta_sq);
        let w0 = (1.0 - m.a0) / beta_sq;
        let w1 = (h - m.a1 - w0) / beta_sq;
        let w2 = (h * h - 2.0 * w0 - 2.0 * w1) / beta_sq;
        Self { m, w0, w1, w2 }
    }

    fn from_quadrature(h: f64, beta_sq: f64) -> Self {
        let m = multipliers_with_derivatives(h, beta_sq);
        let panels = (h / PANEL).ceil().max(1.0) as usize;
        let ph = h / panels as f64;
        let (mut w0, mut w1, mut w2) = (0.0, 0.0, 0.0);
        GL.with(|(x, w)| {
            for p in 0..panels {
                let a = p as f64 * ph;
                for (xi, wi) in x.iter().zip(w) {
                    let tau = a + 0.5 * ph * (xi + 1.0);
                    let wt = 0.5 * ph * wi;
                    let a1 = super::multipliers_real(tau, beta_sq).1;
                    let r = h - tau;
                    w0 += wt * a1;
                    w1 += wt * a1 * r;
                    w2 += wt * a1 * r * r;
                }
            }
        });
        Self { m, w0, w1, w2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_closed_form() {
        // A1 = 1 − e^{−τ}: W0 = h − (1 − e^{−h})
        let w = StepWeights::new(1.0, 0.0);
        assert!((w.w0 - 0.367_879_441_171_442_3).abs() < 1e-14);
    }

    #[test]
    fn branches_agree_at_switch() {
        let h = 0.5;
        let b2 = 64.0 / (h * h);
        let lo = StepWeights::from_quadrature(h, b2);
        let hi = StepWeights::from_identities(h, b2);
        for (a, b) in [(lo.w0, hi.w0), (lo.w1, hi.w1), (lo.w2, hi.w2)] {
            assert!((a - b).abs() < 1e-9 * a.abs().max(1e-6), "{a} {b}");
        }
    }

    #[test]
    fn identities_hold_in_quadrature_branch() {
        for &b2 in &[1e-8, 0.1, 0.25, 0.3, 5.0, 100.0] {
            let h = 0.4;
            let w = StepWeights::new(h, b2);
            assert!((b2 * w.w0 - (1.0 - w.m.a0)).abs() < 1e-13);
            assert!((b2 * w.w1 - (h - w.m.a1 - w.w0)).abs() < 1e-13);
            assert!((b2 * w.w2 - (h * h - 2.0 * w.w0 - 2.0 * w.w1)).abs() < 1e-13);
        }
    }
}
