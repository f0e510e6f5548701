use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_fourier::LambdaGridSpec;
use crate::hermite_core::HermiteBasisSpec;
use crate::spectral_field::{sobolev_norm, synthesize_band_field, AmplitudeProfile};

use super::{evolve_linear, CauchyData};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    pub n: usize,
    pub s: f64,
    pub gamma: f64,
    pub k_max: usize,
    /// Degrees carrying data.
    pub k_set: Vec<usize>,
    pub lambda_grid: LambdaGridSpec,
    /// Data satisfy |c|² dμ ∝ λ^{γ−1+margin} dλ near 0: just inside Ḣ^{−γ}.
    pub margin: f64,
    pub cutoff: f64,
    /// Replaces the default λ-profile when set.
    #[serde(default)]
    pub amplitude: Option<AmplitudeProfile>,
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
}

impl DecaySpec {
    pub fn new(n: usize, s: f64, gamma: f64) -> Self {
        Self {
            n,
            s,
            gamma,
            k_max: 8,
            k_set: vec![0, 1, 2, 3],
            lambda_grid: LambdaGridSpec::Log {
                lambda_min: 1e-7,
                lambda_max: 10.0,
                per_sign: 160,
            },
            margin: 0.05,
            cutoff: 1.0,
            amplitude: None,
            t_lo: 10.0,
            t_hi: 1e3,
            points: 64,
        }
    }

    pub fn theory_slope(&self) -> f64 {
        -(self.s + self.gamma) / 2.0
    }

    pub fn profile(&self) -> AmplitudeProfile {
        if let Some(a) = self.amplitude {
            return a;
        }
        AmplitudeProfile::SmoothPower {
            exponent: 0.5 * (self.gamma - self.n as f64 - 1.0 + self.margin),
            cutoff: self.cutoff,
        }
    }

    fn refined(&self) -> Self {
        Self {
            k_max: 2 * self.k_max,
            lambda_grid: self.lambda_grid.refined(),
            ..self.clone()
        }
    }

    pub fn t_grid(&self) -> Vec<f64> {
        let r = (self.t_hi / self.t_lo).ln();
        (0..self.points)
            .map(|i| self.t_lo * (r * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub fit_window: (f64, f64),
    pub max_residual: f64,
    pub refinement_shift: f64,
    pub times: Vec<f64>,
    pub hs_norms: Vec<f64>,
    pub l2_norms: Vec<f64>,
}

/// Least-squares line through (ln(1+t), ln y): (slope, intercept, max |residual|).
pub fn fit_log_log(ts: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if ts.len() < 2 || ts.len() != ys.len() || ys.iter().any(|y| !(*y > 0.0)) {
        return Err(Error::invalid("log-log fit needs >= 2 positive samples"));
    }
    let xs: Vec<f64> = ts.iter().map(|t| (1.0 + t).ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ls.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ls)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, max_residual))
}

fn run_once(spec: &DecaySpec) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let basis = HermiteBasisSpec::for_degree(spec.n, spec.k_max)?;
    let grid = Arc::new(spec.lambda_grid.build(spec.n)?);
    let band = (0.0, f64::INFINITY);
    let u0 = synthesize_band_field(&basis, grid, &spec.k_set, band, &spec.profile())?;
    let data = CauchyData::new(u0.clone(), u0, 1.0)?;
    let ts = spec.t_grid();
    let mut hs = Vec::with_capacity(ts.len());
    let mut l2 = Vec::with_capacity(ts.len());
    for &t in &ts {
        let u = evolve_linear(&data, t);
        hs.push(sobolev_norm(&u, spec.s));
        l2.push(sobolev_norm(&u, 0.0));
    }
    Ok((ts, hs, l2))
}

/// Evolves synthesized data and fits the late-time Ḣ^s slope in log(1+t).
pub fn decay_experiment(spec: &DecaySpec) -> Result<DecayFitResult> {
    if spec.s < 0.0 || spec.s + spec.gamma < 0.0 {
        return Err(Error::Precondition("need s >= 0 and s + gamma >= 0".into()));
    }
    if !(spec.t_lo > 0.0 && spec.t_hi > spec.t_lo && spec.points >= 4) {
        return Err(Error::invalid("bad fit window"));
    }
    let (ts, hs, l2) = run_once(spec)?;
    let (slope, intercept, max_residual) = fit_log_log(&ts, &hs)?;
    let (_, hs_ref, _) = run_once(&spec.refined())?;
    let (slope_ref, _, _) = fit_log_log(&ts, &hs_ref)?;
    let refinement_shift = (slope - slope_ref).abs();
    if refinement_shift > 0.02 {
        return Err(Error::Precondition(format!(
            "refinement shift {refinement_shift:.3} > 0.02: truncation-dominated run"
        )));
    }
    Ok(DecayFitResult {
        slope,
        intercept,
        fit_window: (spec.t_lo, spec.t_hi),
        max_residual,
        refinement_shift,
        times: ts,
        hs_norms: hs,
        l2_norms: l2,
    })
}
