//! Closed-form exponents of the problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentQuery {
    pub q: f64,
    pub gamma: f64,
    pub p: f64,
    pub s: f64,
}

impl ExponentQuery {
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// p_crit = 1 + 4/(Q + 2γ).
pub fn critical_exponent(q: f64, gamma: f64) -> f64 {
    1.0 + 4.0 / (q + 2.0 * gamma)
}

/// 1 + 2γ/Q, the other lower constraint on p in the global theory.
pub fn regularity_exponent(q: f64, gamma: f64) -> f64 {
    1.0 + 2.0 * gamma / q
}

/// Positive root of 2γ² + Qγ − 2Q = 0.
pub fn gamma_tilde(q: f64) -> f64 {
    (-q + (q * q + 16.0 * q).sqrt()) / 4.0
}

/// max(p_crit, 1 + 2γ/Q): the lower end of the global-existence range.
pub fn global_existence_threshold(q: f64, gamma: f64) -> f64 {
    critical_exponent(q, gamma).max(regularity_exponent(q, gamma))
}

/// Exponent e with T_ε ≃ ε^e, e = −(1/(p−1) − (Q/4 + γ/2))^{−1}.
pub fn lifespan_exponent(q: f64, gamma: f64, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("p = {p} must exceed 1")));
    }
    let d = 1.0 / (p - 1.0) - (q / 4.0 + gamma / 2.0);
    if p >= critical_exponent(q, gamma) || d <= 0.0 {
        return Err(Error::Precondition(format!(
            "p = {p} is not below p_crit = {}",
            critical_exponent(q, gamma)
        )));
    }
    Ok(-1.0 / d)
}

/// Q + 2 − 2p' − Q/2 + γ; negative exactly when p < p_crit.
pub fn blowup_sign_exponent(q: f64, gamma: f64, p: f64) -> f64 {
    let pc = p / (p - 1.0);
    q + 2.0 - 2.0 * pc - q / 2.0 + gamma
}

/// θ for ‖u‖_q ≲ ‖u‖_{Ḣ^s}^θ ‖u‖_r^{1−θ}, with the admissibility verdict.
pub fn gn_theta(q_exp: f64, s: f64, r: f64, q: f64) -> Result<(f64, bool)> {
    if !(q_exp > 0.0 && s > 0.0 && r > 0.0 && q > 0.0) {
        return Err(Error::invalid("gn_theta needs positive inputs"));
    }
    let den = s / q + 0.5 - 1.0 / r;
    if den.abs() < 1e-14 {
        return Err(Error::Precondition("s/Q + 1/2 = 1/r is excluded".into()));
    }
    let theta = (0.5 - 1.0 / q_exp) / den;
    let tol = 1e-12;
    let q_top = if q - s * r > 0.0 {
        r * q / (q - s * r)
    } else {
        f64::INFINITY
    };
    let admissible = s <= 1.0
        && r > 1.0
        && r < q / s
        && q_exp >= 2.0 - tol
        && q_exp <= q_top * (1.0 + tol)
        && (-tol..=1.0 + tol).contains(&theta);
    Ok((theta, admissible))
}
