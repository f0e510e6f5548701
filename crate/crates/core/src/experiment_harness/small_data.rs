//! Small-data runs above the critical exponent: bisection for an amplitude
//! that stays bounded, and the decay rates of that solution.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis_lab::{critical_exponent, global_existence_threshold};
use crate::error::{Error, Result};
use crate::group_fourier::{SpectralField, TransformPlan};
use crate::linear_propagator::{fit_log_log, CauchyData};
use crate::nonlinear_solver::{run_nonlinear, NonlinearGridSpec, Nonlinearity, RunConfig, StopReason};
use crate::spectral_field::{synthesize_band_field, AmplitudeProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallDataSpec {
    pub q: usize,
    pub gamma: f64,
    pub p: f64,
    pub s: f64,
    pub horizon: f64,
    /// Slopes are fitted on [fit_from, horizon].
    pub fit_from: f64,
    /// Bisection bracket for ε, searched geometrically.
    pub eps_hi: f64,
    pub eps_lo: f64,
    pub iterations: usize,
    /// The reported small-data run uses ε = boundary / safety.
    pub safety: f64,
    /// A run is bounded when X_s(horizon) < growth_limit · X_s(1).
    pub growth_limit: f64,
    pub k_max: usize,
    pub lambda_max: f64,
    pub dt0: f64,
    /// Data degrees and λ-profile, as in the linear decay study.
    pub k_set: Vec<usize>,
    pub margin: f64,
    pub cutoff: f64,
}

impl SmallDataSpec {
    pub fn new(q: usize, gamma: f64, p: f64, s: f64) -> Self {
        Self {
            q,
            gamma,
            p,
            s,
            horizon: 200.0,
            fit_from: 10.0,
            eps_hi: 100.0,
            eps_lo: 0.1,
            iterations: 6,
            safety: 4.0,
            growth_limit: 2.0,
            k_max: 16,
            lambda_max: 2.0,
            dt0: 0.5,
            k_set: vec![0, 1, 2, 3],
            margin: 0.05,
            cutoff: 1.0,
        }
    }

    fn n(&self) -> usize {
        (self.q - 2) / 2
    }

    pub fn profile(&self) -> AmplitudeProfile {
        AmplitudeProfile::SmoothPower {
            exponent: 0.5 * (self.gamma - self.n() as f64 - 1.0 + self.margin),
            cutoff: self.cutoff,
        }
    }

    pub fn grids(&self) -> NonlinearGridSpec {
        let t = self.horizon;
        NonlinearGridSpec::for_box(self.n(), self.k_max, 2.5 * t.sqrt(), 2.5 * t, self.lambda_max)
    }

    fn validate(&self) -> Result<()> {
        if self.q < 4 || !self.q.is_multiple_of(2) {
            return Err(Error::invalid("Q must be an even integer >= 4"));
        }
        if !(self.eps_lo > 0.0 && self.eps_hi > self.eps_lo) {
            return Err(Error::invalid("need 0 < eps_lo < eps_hi"));
        }
        if !(self.safety >= 1.0) {
            return Err(Error::invalid("safety factor must be at least 1"));
        }
        if !(self.fit_from > 0.0 && self.horizon > 2.0 * self.fit_from) {
            return Err(Error::invalid("fit window must satisfy 0 < fit_from < horizon / 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallDataRun {
    pub eps: f64,
    pub bounded: bool,
    pub stop: StopReason,
    /// X_s at the end of the run over X_s at t = 1.
    pub growth: f64,
    pub l2_slope: Option<f64>,
    pub hs_slope: Option<f64>,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub l2_norms: Vec<f64>,
    #[serde(skip)]
    pub hs_norms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallDataResult {
    pub q: usize,
    pub gamma: f64,
    pub p: f64,
    pub s: f64,
    pub p_crit: f64,
    /// max(p_crit, 1 + 2γ/Q)
    pub p_global: f64,
    pub linear_l2_slope: f64,
    pub linear_hs_slope: f64,
    /// Largest bounded ε found by the bisection, and its run.
    pub boundary: Option<SmallDataRun>,
    /// The run at boundary / safety.
    pub accepted: Option<SmallDataRun>,
    /// Every bisection probe as (ε, bounded, growth).
    pub history: Vec<(f64, bool, f64)>,
}

/// Band-limited data on the run's λ grid, shaped like the decay study's data.
pub fn small_data_field(spec: &SmallDataSpec) -> Result<(Arc<TransformPlan>, SpectralField)> {
    let plan = Arc::new(spec.grids().plan()?);
    let u0 = synthesize_band_field(
        &plan.basis,
        plan.lgrid.clone(),
        &spec.k_set,
        (0.0, spec.lambda_max),
        &spec.profile(),
    )?;
    Ok((plan, u0))
}

fn slope(ts: &[f64], ys: &[f64], from: f64) -> Option<f64> {
    let (t, y): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(ys)
        .filter(|(t, y)| **t >= from && y.is_finite() && **y > 0.0)
        .map(|(t, y)| (*t, *y))
        .unzip();
    fit_log_log(&t, &y).ok().map(|f| f.0)
}

fn run_eps(spec: &SmallDataSpec, plan: &Arc<TransformPlan>, u0: &SpectralField, eps: f64) -> Result<SmallDataRun> {
    let data = CauchyData::new(u0.clone(), u0.clone(), eps)?;
    let mut cfg = RunConfig::new(spec.p, spec.gamma, spec.s, spec.horizon);
    cfg.dt.dt0 = spec.dt0;
    let rec = run_nonlinear(&data, Nonlinearity::new(plan.clone(), spec.p)?, &cfg)?;
    let at1 = rec.xs_at(1.0).unwrap_or(f64::INFINITY);
    let growth = rec.xs_running.last().copied().unwrap_or(f64::INFINITY) / at1;
    let bounded = rec.stop == StopReason::Horizon && !rec.blowup_flag && growth < spec.growth_limit;
    Ok(SmallDataRun {
        eps,
        bounded,
        stop: rec.stop,
        growth,
        l2_slope: slope(&rec.times, &rec.l2_norms, spec.fit_from),
        hs_slope: slope(&rec.times, &rec.hs_norms, spec.fit_from),
        times: rec.times,
        l2_norms: rec.l2_norms,
        hs_norms: rec.hs_norms,
    })
}

/// Geometric bisection between eps_lo and eps_hi for the largest ε whose
/// run stays bounded through the horizon, then a run one safety factor below.
pub fn small_data_experiment(spec: &SmallDataSpec) -> Result<SmallDataResult> {
    spec.validate()?;
    let (plan, u0) = small_data_field(spec)?;
    let mut history = Vec::new();
    let mut probe = |eps: f64| -> Result<SmallDataRun> {
        let r = run_eps(spec, &plan, &u0, eps)?;
        history.push((r.eps, r.bounded, r.growth));
        Ok(r)
    };
    let hi = probe(spec.eps_hi)?;
    let boundary = if hi.bounded {
        Some(hi)
    } else {
        let lo = probe(spec.eps_lo)?;
        if lo.bounded {
            let (mut a, mut b) = (spec.eps_lo, spec.eps_hi);
            let mut best = lo;
            for _ in 0..spec.iterations {
                let mid = (a * b).sqrt();
                let r = probe(mid)?;
                if r.bounded {
                    a = mid;
                    best = r;
                } else {
                    b = mid;
                }
            }
            Some(best)
        } else {
            None
        }
    };
    let accepted = match &boundary {
        Some(b) => Some(run_eps(spec, &plan, &u0, b.eps / spec.safety)?),
        None => None,
    };
    let qf = spec.q as f64;
    Ok(SmallDataResult {
        q: spec.q,
        gamma: spec.gamma,
        p: spec.p,
        s: spec.s,
        p_crit: critical_exponent(qf, spec.gamma),
        p_global: global_existence_threshold(qf, spec.gamma),
        linear_l2_slope: -spec.gamma / 2.0,
        linear_hs_slope: -(spec.s + spec.gamma) / 2.0,
        boundary,
        accepted,
        history,
    })
}
