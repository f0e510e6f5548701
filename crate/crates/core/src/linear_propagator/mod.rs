//! Exact per-mode propagation of v'' + v' + β² v = 0 and the linear decay experiment.

mod decay;
mod oracle;
mod weights;

pub use decay::{decay_experiment, fit_log_log, DecayFitResult, DecaySpec};
pub use oracle::mode_ode_reference;
pub use weights::StepWeights;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group_fourier::SpectralField;
use crate::hermite_core::hermite_eigenvalue;

/// |1 − 4β²| below which the degenerate-root expansion is used.
pub const DEGENERATE_WINDOW: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicRoots {
    pub m1: Complex64,
    pub m2: Complex64,
}

/// Roots of m² + m + β² = 0, ordered Re m1 ≤ Re m2.
pub fn characteristic_roots(beta_sq: f64) -> CharacteristicRoots {
    let disc = 1.0 - 4.0 * beta_sq;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // m2 = (−1 + √disc)/2 rewritten to avoid cancellation at small β²
        let m2 = -2.0 * beta_sq / (1.0 + sq);
        let m1 = -1.0 - m2;
        CharacteristicRoots {
            m1: Complex64::new(m1, 0.0),
            m2: Complex64::new(m2, 0.0),
        }
    } else {
        let w = 0.5 * (-disc).sqrt();
        CharacteristicRoots {
            m1: Complex64::new(-0.5, -w),
            m2: Complex64::new(-0.5, w),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeMultipliers {
    pub a0: Complex64,
    pub a1: Complex64,
    pub beta_sq: f64,
    pub t: f64,
}

/// A0, A1 and their time derivatives, all real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multipliers {
    pub a0: f64,
    pub a1: f64,
    pub da0: f64,
    pub da1: f64,
}

fn degenerate_series(t: f64, beta_sq: f64) -> (f64, f64) {
    // with δ = (1 − 4β²)/4 and z = δ t²: A1 = e^{−t/2} t Σ z^k/(2k+1)!,
    // A0 = e^{−t/2} (Σ z^k/(2k)! + (t/2) Σ z^k/(2k+1)!)
    let z = 0.25 * (1.0 - 4.0 * beta_sq) * t * t;
    let (mut c, mut s) = (0.0, 0.0);
    let mut term_c = 1.0;
    let mut term_s = 1.0;
    for k in 0..200 {
        c += term_c;
        s += term_s;
        let kf = k as f64;
        term_c *= z / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        term_s *= z / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        if term_c.abs() < 1e-18 * c.abs() && term_s.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    let e = (-0.5 * t).exp();
    (e * (c + 0.5 * t * s), e * t * s)
}

/// (A0(t), A1(t)) for modes with frequency β².
#[inline]
pub fn multipliers_real(t: f64, beta_sq: f64) -> (f64, f64) {
    if t == 0.0 {
        return (1.0, 0.0);
    }
    let disc = 1.0 - 4.0 * beta_sq;
    if disc.abs() < DEGENERATE_WINDOW {
        degenerate_series(t, beta_sq)
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let d = 0.5 * sq;
        let m2 = -2.0 * beta_sq / (1.0 + sq);
        let e2 = (m2 * t).exp();
        let g = -(-2.0 * d * t).exp_m1() / (2.0 * d);
        (e2 * (1.0 - m2 * g), e2 * g)
    } else {
        let w = 0.5 * (-disc).sqrt();
        let e = (-0.5 * t).exp();
        let (s, c) = (w * t).sin_cos();
        (e * (c + s / (2.0 * w)), e * s / w)
    }
}

#[inline]
pub fn multipliers_with_derivatives(t: f64, beta_sq: f64) -> Multipliers {
    let (a0, a1) = multipliers_real(t, beta_sq);
    Multipliers {
        a0,
        a1,
        da0: -beta_sq * a1,
        da1: a0 - a1,
    }
}

pub fn mode_multipliers(t: f64, beta_sq: f64) -> ModeMultipliers {
    let (a0, a1) = multipliers_real(t, beta_sq);
    ModeMultipliers {
        a0: Complex64::new(a0, 0.0),
        a1: Complex64::new(a1, 0.0),
        beta_sq,
        t,
    }
}

/// Initial data (ε u₀, ε u₁).
#[derive(Clone, Debug)]
pub struct CauchyData {
    pub u0: SpectralField,
    pub u1: SpectralField,
    pub eps: f64,
}

impl CauchyData {
    pub fn new(u0: SpectralField, u1: SpectralField, eps: f64) -> Result<Self> {
        u0.check_layout(&u1)?;
        Ok(Self { u0, u1, eps })
    }
}

/// Applies the multipliers mode by mode to (u, v) = (position, velocity).
pub fn propagate(u: &SpectralField, v: &SpectralField, t: f64) -> (SpectralField, SpectralField) {
    let mut uo = u.clone();
    let mut vo = v.clone();
    let lam = u.grid.positive_nodes();
    for k in 0..u.degrees() {
        let mu = hermite_eigenvalue(k, u.basis.n) as f64;
        for (m, l) in lam.iter().enumerate() {
            let w = multipliers_with_derivatives(t, l * mu);
            for j in [u.grid.j_pos(m), u.grid.j_neg(m)] {
                let (a, b) = (u.get(k, j), v.get(k, j));
                uo.set(k, j, w.a0 * a + w.a1 * b);
                vo.set(k, j, w.da0 * a + w.da1 * b);
            }
        }
    }
    (uo, vo)
}

/// û(t) = A0 û₀ + A1 û₁ per mode, with β² = |λ_j| μ_k.
pub fn evolve_linear(data: &CauchyData, t: f64) -> SpectralField {
    propagate(&data.u0, &data.u1, t).0.scaled(data.eps)
}
