//! Threshold-based lifespan estimates and their certification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_propagator::CauchyData;

use super::{run_nonlinear, DtPolicy, Nonlinearity, RunConfig, StopReason, TrajectoryRecord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupPolicy {
    /// Detection threshold M as a multiple of the initial L² norm.
    pub threshold_factor: f64,
    /// Runs continue to this multiple of M to test threshold insensitivity.
    pub insensitivity_factor: f64,
    /// Relative agreement required under dt halving and the larger threshold.
    pub tolerance: f64,
}

impl Default for BlowupPolicy {
    fn default() -> Self {
        Self {
            threshold_factor: 1e6,
            insensitivity_factor: 10.0,
            tolerance: 0.05,
        }
    }
}

impl BlowupPolicy {
    pub fn stop_factor(&self) -> f64 {
        self.threshold_factor * self.insensitivity_factor
    }
}

/// First time the L² norm exceeds `factor` times its initial value,
/// interpolated in log-norm between samples.
pub(crate) fn crossing(rec: &TrajectoryRecord, factor: f64) -> Option<f64> {
    let l0 = *rec.l2_norms.first()?;
    let level = factor * l0;
    let i = rec.l2_norms.iter().position(|x| *x > level)?;
    if i == 0 {
        return Some(rec.times[0]);
    }
    let (t0, t1) = (rec.times[i - 1], rec.times[i]);
    let (a, b) = (rec.l2_norms[i - 1], rec.l2_norms[i]);
    if !b.is_finite() || a <= 0.0 {
        return Some(t1);
    }
    let s = (level.ln() - a.ln()) / (b.ln() - a.ln());
    Some(t0 + s * (t1 - t0))
}

/// Lifespan estimate: the threshold crossing, or the stop time when the run
/// ended through step rejection or the dt floor. None for runs that reached
/// their horizon below threshold.
pub fn detect_blowup(rec: &TrajectoryRecord, policy: &BlowupPolicy) -> Option<f64> {
    if let Some(t) = crossing(rec, policy.threshold_factor) {
        return Some(t);
    }
    match rec.stop {
        StopReason::Rejected | StopReason::DtFloor => rec.times.last().copied(),
        StopReason::Horizon | StopReason::Threshold => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanCertificate {
    pub estimate: Option<f64>,
    pub high_threshold_estimate: Option<f64>,
    pub halved_dt_estimate: Option<f64>,
    pub threshold_shift: Option<f64>,
    pub dt_shift: Option<f64>,
    pub certified: bool,
}

fn rel(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a - b).abs() / a.abs().max(f64::MIN_POSITIVE)),
        _ => None,
    }
}

/// Runs at the configured dt and at dt/2 and compares the estimates, plus
/// the crossing of the 10× larger threshold on the first run.
pub fn certify_lifespan(
    data: &CauchyData,
    nl: Nonlinearity,
    config: &RunConfig,
) -> Result<(TrajectoryRecord, LifespanCertificate)> {
    let primary = run_nonlinear(data, nl.clone(), config)?;
    let estimate = primary.lifespan_estimate;
    let high = primary
        .lifespan_high_threshold
        .or(if estimate.is_some() && primary.stop != StopReason::Threshold {
            primary.times.last().copied()
        } else {
            None
        });
    let halved = if estimate.is_some() {
        let cfg = RunConfig {
            dt: config.dt.halved(),
            ..config.clone()
        };
        run_nonlinear(data, nl, &cfg)?.lifespan_estimate
    } else {
        None
    };
    let threshold_shift = rel(estimate, high);
    let dt_shift = rel(estimate, halved);
    let tol = config.blowup.tolerance;
    let certified = matches!((threshold_shift, dt_shift), (Some(a), Some(b)) if a < tol && b < tol);
    Ok((
        primary,
        LifespanCertificate {
            estimate,
            high_threshold_estimate: high,
            halved_dt_estimate: halved,
            threshold_shift,
            dt_shift,
            certified,
        },
    ))
}

/// RK4 trajectory of the scalar model v' = v^p under the same dt policy,
/// recorded with |v| in the norm columns.
pub fn ode_model_trajectory(
    p: f64,
    v0: f64,
    dt: &DtPolicy,
    policy: &BlowupPolicy,
    t_max: f64,
) -> Result<TrajectoryRecord> {
    if !(p > 1.0 && v0 > 0.0) {
        return Err(Error::invalid("model needs p > 1 and v0 > 0"));
    }
    let f = |v: f64| v.abs().powf(p);
    let mut rec = TrajectoryRecord {
        times: vec![0.0],
        l2_norms: vec![v0],
        hs_norms: vec![v0],
        xs_running: vec![v0],
        blowup_flag: false,
        lifespan_estimate: None,
        dt_used: Vec::new(),
        stop: StopReason::Horizon,
        lifespan_high_threshold: None,
    };
    let (mut t, mut v) = (0.0, v0);
    let stop = policy.stop_factor() * v0;
    while t < t_max {
        let h = dt.select(v, p).min(t_max - t);
        if h < dt.floor {
            rec.stop = StopReason::DtFloor;
            break;
        }
        let k1 = f(v);
        let k2 = f(v + 0.5 * h * k1);
        let k3 = f(v + 0.5 * h * k2);
        let k4 = f(v + h * k3);
        v += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        t += h;
        rec.dt_used.push(h);
        rec.times.push(t);
        rec.l2_norms.push(v);
        rec.hs_norms.push(v);
        rec.xs_running.push(v.max(*rec.xs_running.last().unwrap()));
        if !v.is_finite() {
            rec.stop = StopReason::Rejected;
            break;
        }
        if v > stop {
            rec.stop = StopReason::Threshold;
            break;
        }
    }
    rec.lifespan_estimate = detect_blowup(&rec, policy);
    rec.blowup_flag = rec.lifespan_estimate.is_some();
    rec.lifespan_high_threshold = crossing(&rec, policy.stop_factor());
    Ok(rec)
}
