//! Lifespan sweeps in ε and their power-law fit.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis_lab::{critical_exponent, lifespan_exponent, regularity_exponent};
use crate::error::{Error, Result};
use crate::nonlinear_solver::{
    blowup_data, run_nonlinear, NonlinearGridSpec, Nonlinearity, RunConfig, StopReason,
};
use crate::spectral_field::DataProfileSpec;

use super::fit::{fit_power_law, PowerLawFit};
use super::manifest::Resolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanSpec {
    pub q: usize,
    pub gamma: f64,
    pub p: f64,
    pub eps: Vec<f64>,
    pub resolution: Resolution,
    /// Repeat each run at dt/2 and require agreement.
    pub certify_dt: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanPoint {
    pub eps: f64,
    pub lifespan: Option<f64>,
    pub high_threshold_lifespan: Option<f64>,
    pub threshold_shift: Option<f64>,
    pub halved_dt_lifespan: Option<f64>,
    pub dt_shift: Option<f64>,
    pub stop: StopReason,
    pub r_max: f64,
    pub tau_max: f64,
    pub attempts: usize,
    pub steps: usize,
    pub runtime_seconds: f64,
}

impl LifespanPoint {
    /// Blew up, and the estimate moved by less than `tol` under the larger
    /// threshold (and under dt halving when that was run).
    pub fn insensitive(&self, tol: f64) -> bool {
        self.lifespan.is_some()
            && self.threshold_shift.is_some_and(|s| s < tol)
            && self.dt_shift.map_or(self.halved_dt_lifespan.is_none(), |s| s < tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanResult {
    pub q: usize,
    pub gamma: f64,
    pub p: f64,
    pub theory: f64,
    pub fit: Option<PowerLawFit>,
    /// |fitted − theory| / |theory|
    pub deviation: Option<f64>,
    pub points: Vec<LifespanPoint>,
    /// Some ε did not blow up within its horizon.
    pub inconclusive: bool,
    /// Whether p ≥ 1 + 2γ/Q, the range where the matching lower bound is proved.
    pub lower_bound_admissible: bool,
}

fn check(spec: &LifespanSpec) -> Result<f64> {
    let q = spec.q as f64;
    if spec.p >= critical_exponent(q, spec.gamma) {
        return Err(Error::Precondition(format!(
            "p = {} is not below p_crit = {}",
            spec.p,
            critical_exponent(q, spec.gamma)
        )));
    }
    if spec.eps.is_empty() || spec.eps.iter().any(|e| *e <= 0.0) {
        return Err(Error::invalid("eps grid must be non-empty and positive"));
    }
    lifespan_exponent(q, spec.gamma, spec.p)
}

/// Box [0, 2.5√T] × [−2.5T, 2.5T] for an expected lifespan T.
fn grids_for(n: usize, res: &Resolution, t_guess: f64) -> NonlinearGridSpec {
    NonlinearGridSpec::for_box(n, res.k_max, 2.5 * t_guess.sqrt(), 2.5 * t_guess, res.lambda_max)
}

/// One ε: sizes the box from the predicted lifespan, enlarging it when the
/// run outlives the box's trusted horizon.
pub fn lifespan_point(spec: &LifespanSpec, eps: f64) -> Result<LifespanPoint> {
    let exponent = check(spec)?;
    let res = &spec.resolution;
    let n = (spec.q - 2) / 2;
    let profile = DataProfileSpec::new(res.c0, spec.q, spec.gamma)?;
    let mut t_guess = res.guess_scale * (res.c0 * eps).powf(exponent);
    let clock = Instant::now();
    let mut attempts = 0;
    loop {
        attempts += 1;
        let grids = grids_for(n, res, t_guess.max(4.0));
        let (plan, data) = blowup_data(&profile, &grids, eps)?;
        let nl = Nonlinearity::new(plan, spec.p)?;
        let mut cfg = RunConfig::new(spec.p, spec.gamma, 1.0, 2.0 * t_guess.max(4.0));
        cfg.dt.dt0 = res.dt0;
        let rec = run_nonlinear(&data, nl.clone(), &cfg)?;
        if rec.lifespan_estimate.is_none() && rec.stop == StopReason::Horizon && attempts < 4 {
            t_guess *= 2.0;
            continue;
        }
        let halved = if spec.certify_dt && rec.lifespan_estimate.is_some() {
            let cfg2 = RunConfig {
                dt: cfg.dt.halved(),
                ..cfg.clone()
            };
            run_nonlinear(&data, nl, &cfg2)?.lifespan_estimate
        } else {
            None
        };
        let rel = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => Some((a - b).abs() / a),
            _ => None,
        };
        let high = rec
            .lifespan_high_threshold
            .or(if rec.stop == StopReason::Threshold { None } else { rec.times.last().copied() })
            .filter(|_| rec.lifespan_estimate.is_some());
        return Ok(LifespanPoint {
            eps,
            lifespan: rec.lifespan_estimate,
            high_threshold_lifespan: high,
            threshold_shift: rel(rec.lifespan_estimate, high),
            halved_dt_lifespan: halved,
            dt_shift: rel(rec.lifespan_estimate, halved),
            stop: rec.stop,
            r_max: grids.physical.r.max,
            tau_max: grids.physical.tau.max,
            attempts,
            steps: rec.dt_used.len(),
            runtime_seconds: clock.elapsed().as_secs_f64(),
        });
    }
}

/// Fit of the lifespans against ε, compared with the predicted exponent.
pub fn summarize_lifespans(spec: &LifespanSpec, points: Vec<LifespanPoint>) -> Result<LifespanResult> {
    let theory = check(spec)?;
    let pairs: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.lifespan.map(|t| (p.eps, t)))
        .collect();
    let inconclusive = pairs.len() < points.len();
    let fit = if inconclusive { None } else { fit_power_law(&pairs).ok() };
    let q = spec.q as f64;
    Ok(LifespanResult {
        q: spec.q,
        gamma: spec.gamma,
        p: spec.p,
        theory,
        deviation: fit.map(|f| (f.exponent - theory).abs() / theory.abs()),
        fit,
        points,
        inconclusive,
        lower_bound_admissible: spec.p >= regularity_exponent(q, spec.gamma),
    })
}

pub fn lifespan_experiment(spec: &LifespanSpec) -> Result<LifespanResult> {
    check(spec)?;
    let points = spec
        .eps
        .iter()
        .map(|e| lifespan_point(spec, *e))
        .collect::<Result<Vec<_>>>()?;
    summarize_lifespans(spec, points)
}
