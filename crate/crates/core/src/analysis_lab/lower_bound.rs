//! ∫ (u₀ + u₁) φ_R(0, ·) for the equality-case data against C₀ R^{Q/2−γ} / log R.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite_core::quadrature::gauss_legendre_on;
use crate::spectral_field::DataProfileSpec;

use super::bump::BumpSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCheck {
    pub r: f64,
    pub integral: f64,
    pub bound: f64,
    /// integral / bound
    pub margin: f64,
}

/// Area of the unit sphere in ℝⁿ.
fn sphere(n: usize) -> f64 {
    // Γ(n/2) from Γ(1/2) = √π, Γ(1) = 1
    let mut g = if n.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut k = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while k < 0.5 * n as f64 - 1e-12 {
        g *= k;
        k += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(0.5 * n as f64) / g
}

fn panels(edges: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut w = Vec::new();
    for e in edges.windows(2) {
        let (px, pw) = gauss_legendre_on(order, e[0], e[1]);
        x.extend(px);
        w.extend(pw);
    }
    (x, w)
}

/// Geometric edges from `first` up to `top`, with 0 and `breaks` inserted.
fn geometric_edges(first: f64, top: f64, breaks: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0];
    let mut x = first;
    while x < top {
        e.push(x);
        x *= 2.0;
    }
    e.push(top);
    e.extend(breaks.iter().filter(|b| **b > 0.0 && **b < top));
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * top);
    e
}

const ORDER: usize = 16;

/// Left side by Gauss–Legendre quadrature over |x|, |y| ∈ [0, R] (polar in
/// each ℝⁿ factor) and τ ∈ [0, R²], with u₀ + u₁ equal to the profile.
pub fn data_lower_bound_check(spec: &DataProfileSpec, bump: &BumpSpec) -> Result<LowerBoundCheck> {
    spec.validate()?;
    let r = bump.r;
    if !(r > 1.0) {
        return Err(Error::Precondition("R must exceed 1".into()));
    }
    let n = (spec.q - 2) / 2;
    let (rho, wrho) = panels(
        &geometric_edges(1e-2, r, &[bump.alpha.plateau * r]),
        ORDER,
    );
    let r2 = r * r;
    let (tau, wtau) = panels(&geometric_edges(1e-4, r2, &[bump.beta.plateau * r2]), ORDER);
    let alpha: Vec<f64> = rho
        .iter()
        .zip(&wrho)
        .map(|(p, w)| w * p.powi(n as i32 - 1) * bump.alpha.eval(p / r).0)
        .collect();
    let beta: Vec<f64> = tau
        .iter()
        .zip(&wtau)
        .map(|(t, w)| w * bump.beta.eval(t / r2).0)
        .collect();
    // symmetric in ρ₁ ↔ ρ₂: sum i ≤ j with weight 2 off the diagonal
    // rows in parallel, summed in order so the result is reproducible
    let rows: Vec<f64> = (0..rho.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in i..rho.len() {
                let aw = alpha[i] * alpha[j];
                if aw == 0.0 {
                    continue;
                }
                let sr = (rho[i] * rho[i] + rho[j] * rho[j]).sqrt();
                let inner: f64 = tau
                    .iter()
                    .zip(&beta)
                    .filter(|(_, b)| **b != 0.0)
                    .map(|(t, b)| b * spec.value(sr, *t))
                    .sum();
                acc += if i == j { aw * inner } else { 2.0 * aw * inner };
            }
            acc
        })
        .collect();
    let total: f64 = rows.iter().sum();
    let s = sphere(n);
    let integral = 2.0 * s * s * total;
    let bound = spec.c0 * r.powf(spec.q as f64 / 2.0 - spec.gamma) / r.ln();
    Ok(LowerBoundCheck {
        r,
        integral,
        bound,
        margin: integral / bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundFit {
    /// Slope of log I against log R.
    pub raw_slope: f64,
    /// Slope of log(I · log R) against log R: the power with the log factor removed.
    pub power_slope: f64,
}

pub fn lower_bound_fit(checks: &[LowerBoundCheck]) -> Result<LowerBoundFit> {
    if checks.len() < 2 {
        return Err(Error::invalid("need at least two radii"));
    }
    let xs: Vec<f64> = checks.iter().map(|c| c.r.ln()).collect();
    let raw: Vec<f64> = checks.iter().map(|c| c.integral.ln()).collect();
    let pw: Vec<f64> = checks.iter().map(|c| (c.integral * c.r.ln()).ln()).collect();
    Ok(LowerBoundFit {
        raw_slope: slope(&xs, &raw),
        power_slope: slope(&xs, &pw),
    })
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
