//! Mild solutions of u_tt − Lu + u_t = |u|^p: exponential time differencing,
//! blow-up detection and a Picard residual check on stored trajectories.

mod blowup;
mod picard;
mod setup;

pub use blowup::{
    certify_lifespan, detect_blowup, ode_model_trajectory, BlowupPolicy, LifespanCertificate,
};
pub use picard::{picard_residual, StoredTrajectory};
pub use setup::{blowup_data, NonlinearGridSpec};

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_fourier::{SpectralField, TransformPlan};
use crate::hermite_core::hermite_eigenvalue;
use crate::linear_propagator::{CauchyData, StepWeights};
use crate::spectral_field::sobolev_norm;

#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub u: SpectralField,
    /// ∂ₜu coefficients.
    pub v: SpectralField,
    pub t: f64,
    pub eps: f64,
}

impl EvolutionState {
    pub fn initial(data: &CauchyData) -> Self {
        Self {
            u: data.u0.scaled(data.eps),
            v: data.u1.scaled(data.eps),
            t: 0.0,
            eps: data.eps,
        }
    }
}

/// Evaluates |u|^p through the physical grid.
#[derive(Clone, Debug)]
pub struct Nonlinearity {
    pub plan: Arc<TransformPlan>,
    pub p: f64,
    /// When false the term is identically zero (linear runs and checks).
    pub enabled: bool,
}

impl Nonlinearity {
    pub fn new(plan: Arc<TransformPlan>, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!("nonlinearity needs p > 1, got {p}")));
        }
        Ok(Self {
            plan,
            p,
            enabled: true,
        })
    }

    pub fn disabled(plan: Arc<TransformPlan>) -> Self {
        Self {
            plan,
            p: 2.0,
            enabled: false,
        }
    }

    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        if !self.enabled {
            return Ok(self.plan.zero_spectral());
        }
        nonlinearity_transform(&self.plan, u, self.p)
    }
}

/// Inverse transform, pointwise |·|^p, forward transform.
pub fn nonlinearity_transform(plan: &TransformPlan, u: &SpectralField, p: f64) -> Result<SpectralField> {
    let mut f = plan.inverse(u)?;
    for x in f.values.iter_mut() {
        *x = x.abs().powf(p);
    }
    if f.values.iter().any(|x| !x.is_finite()) {
        return Err(Error::StepRejected {
            t: f64::NAN,
            reason: "non-finite physical samples".into(),
        });
    }
    plan.forward(&f)
}

/// Time-step selection: dt = dt0 / (1 + ‖u‖_{L²}^{p−1}), snapped down to the
/// ladder dt0·2^{−k/4} so that step weights can be reused.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtPolicy {
    pub dt0: f64,
    pub floor: f64,
    pub adaptive: bool,
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self {
            dt0: 0.05,
            floor: 1e-6,
            adaptive: true,
        }
    }
}

impl DtPolicy {
    pub fn halved(&self) -> Self {
        Self {
            dt0: 0.5 * self.dt0,
            ..*self
        }
    }

    pub fn select(&self, l2: f64, p: f64) -> f64 {
        if !self.adaptive {
            return self.dt0;
        }
        let target = self.dt0 / (1.0 + l2.powf(p - 1.0));
        let k = (4.0 * (self.dt0 / target).log2() - 1e-9).ceil().max(0.0);
        self.dt0 * (-k / 4.0).exp2()
    }
}

const CACHE_LEVELS: usize = 6;

/// ETD-RK2 stepper with per-step-size weight tables.
pub struct Stepper {
    pub nl: Nonlinearity,
    cache: VecDeque<(u64, Arc<Vec<StepWeights>>)>,
}

impl Stepper {
    pub fn new(nl: Nonlinearity) -> Self {
        Self {
            nl,
            cache: VecDeque::new(),
        }
    }

    /// Weights indexed [k · M + m] over degrees k and positive λ nodes m.
    pub fn weights(&mut self, h: f64) -> Arc<Vec<StepWeights>> {
        let key = h.to_bits();
        if let Some((_, w)) = self.cache.iter().find(|(k, _)| *k == key) {
            return w.clone();
        }
        let plan = &self.nl.plan;
        let lam = plan.lgrid.positive_nodes();
        let n = plan.basis.n;
        let table: Vec<StepWeights> = (0..plan.basis.degrees())
            .flat_map(|k| {
                let mu = hermite_eigenvalue(k, n) as f64;
                lam.iter().map(move |l| StepWeights::new(h, l * mu))
            })
            .collect();
        let table = Arc::new(table);
        if self.cache.len() == CACHE_LEVELS {
            self.cache.pop_front();
        }
        self.cache.push_back((key, table.clone()));
        table
    }

    pub fn step(&mut self, state: &EvolutionState, dt: f64) -> Result<EvolutionState> {
        duhamel_step(self, state, dt)
    }
}

/// One ETD-RK2 step: exact linear propagation, N frozen at the start for the
/// predictor and corrected linearly in time with the predictor's N.
pub fn duhamel_step(stepper: &mut Stepper, state: &EvolutionState, dt: f64) -> Result<EvolutionState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    let w = stepper.weights(dt);
    let grid = state.u.grid.clone();
    let mm = grid.half_len();
    let nj = grid.len();
    let kk = state.u.degrees();
    let t = state.t + dt;
    let at_t = |e: Error| match e {
        Error::StepRejected { reason, .. } => Error::StepRejected { t, reason },
        e => e,
    };
    let n0 = stepper.nl.apply(&state.u).map_err(at_t)?;

    let mut a = state.u.clone();
    let mut av = state.v.clone();
    for k in 0..kk {
        for m in 0..mm {
            let sw = &w[k * mm + m];
            for j in [grid.j_pos(m), grid.j_neg(m)] {
                let i = k * nj + j;
                let (u, v, nn) = (state.u.coeffs[i], state.v.coeffs[i], n0.coeffs[i]);
                a.coeffs[i] = sw.m.a0 * u + sw.m.a1 * v + sw.w0 * nn;
                av.coeffs[i] = sw.m.da0 * u + sw.m.da1 * v + sw.m.a1 * nn;
            }
        }
    }
    if stepper.nl.enabled {
        let na = stepper.nl.apply(&a).map_err(at_t)?;
        for k in 0..kk {
            for m in 0..mm {
                let sw = &w[k * mm + m];
                for j in [grid.j_pos(m), grid.j_neg(m)] {
                    let i = k * nj + j;
                    let d = (na.coeffs[i] - n0.coeffs[i]) / dt;
                    a.coeffs[i] += sw.w1 * d;
                    av.coeffs[i] += sw.w0 * d;
                }
            }
        }
    }
    if !a.is_finite() || !av.is_finite() {
        return Err(Error::StepRejected {
            t,
            reason: "non-finite mode coefficients".into(),
        });
    }
    Ok(EvolutionState {
        u: a,
        v: av,
        t,
        eps: state.eps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: f64,
    pub gamma: f64,
    pub s: f64,
    pub t_max: f64,
    pub dt: DtPolicy,
    pub blowup: BlowupPolicy,
}

impl RunConfig {
    pub fn new(p: f64, gamma: f64, s: f64, t_max: f64) -> Self {
        Self {
            p,
            gamma,
            s,
            t_max,
            dt: DtPolicy::default(),
            blowup: BlowupPolicy::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    /// The L² norm passed the run-stop threshold.
    Threshold,
    /// Non-finite coefficients or transform failure.
    Rejected,
    DtFloor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub hs_norms: Vec<f64>,
    pub xs_running: Vec<f64>,
    pub blowup_flag: bool,
    pub lifespan_estimate: Option<f64>,
    pub dt_used: Vec<f64>,
    pub stop: StopReason,
    /// Crossing time of the run-stop threshold (10× the detection threshold).
    pub lifespan_high_threshold: Option<f64>,
}

impl TrajectoryRecord {
    fn push(&mut self, t: f64, l2: f64, hs: f64, gamma: f64, s: f64) {
        let xs = (1.0 + t).powf(0.5 * gamma) * l2 + (1.0 + t).powf(0.5 * (s + gamma)) * hs;
        let prev = self.xs_running.last().copied().unwrap_or(0.0);
        self.times.push(t);
        self.l2_norms.push(l2);
        self.hs_norms.push(hs);
        self.xs_running.push(prev.max(xs));
    }

    /// Running X_s sup at the first sample at or after t.
    pub fn xs_at(&self, t: f64) -> Option<f64> {
        self.times
            .iter()
            .position(|x| *x >= t - 1e-12)
            .map(|i| self.xs_running[i])
    }
}

fn validate(config: &RunConfig, q: f64) -> Result<()> {
    if !(config.s > 0.0 && config.s <= 1.0) {
        return Err(Error::Precondition(format!("s = {} outside (0, 1]", config.s)));
    }
    if !(config.gamma > 0.0 && config.gamma < q / 2.0) {
        return Err(Error::Precondition(format!(
            "gamma = {} outside (0, Q/2)",
            config.gamma
        )));
    }
    if !(config.t_max > 0.0 && config.dt.dt0 > 0.0 && config.dt.floor > 0.0) {
        return Err(Error::invalid("t_max, dt0 and the dt floor must be positive"));
    }
    Ok(())
}

/// Steps from the data to t_max or until blow-up is detected.
pub fn run_nonlinear(data: &CauchyData, nl: Nonlinearity, config: &RunConfig) -> Result<TrajectoryRecord> {
    run_with_observer(data, nl, config, |_| {})
}

/// As [`run_nonlinear`], additionally handing every accepted state to `observe`.
pub fn run_with_observer(
    data: &CauchyData,
    nl: Nonlinearity,
    config: &RunConfig,
    mut observe: impl FnMut(&EvolutionState),
) -> Result<TrajectoryRecord> {
    validate(config, (2 * data.u0.basis.n + 2) as f64)?;
    if nl.enabled && (nl.p - config.p).abs() > 0.0 {
        return Err(Error::invalid("nonlinearity exponent differs from the run's p"));
    }
    let mut stepper = Stepper::new(nl);
    let mut state = EvolutionState::initial(data);
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        l2_norms: Vec::new(),
        hs_norms: Vec::new(),
        xs_running: Vec::new(),
        blowup_flag: false,
        lifespan_estimate: None,
        dt_used: Vec::new(),
        stop: StopReason::Horizon,
        lifespan_high_threshold: None,
    };
    let l2_0 = sobolev_norm(&state.u, 0.0);
    rec.push(0.0, l2_0, sobolev_norm(&state.u, config.s), config.gamma, config.s);
    observe(&state);
    let stop_level = config.blowup.stop_factor() * l2_0;
    while state.t < config.t_max - 1e-12 {
        let l2 = *rec.l2_norms.last().unwrap();
        let mut dt = config.dt.select(l2, config.p);
        if dt < config.dt.floor {
            rec.stop = StopReason::DtFloor;
            break;
        }
        if state.t + dt > config.t_max {
            dt = config.t_max - state.t;
        }
        match stepper.step(&state, dt) {
            Ok(next) => state = next,
            Err(Error::StepRejected { .. }) => {
                rec.stop = StopReason::Rejected;
                rec.times.push(state.t + dt);
                rec.l2_norms.push(f64::INFINITY);
                rec.hs_norms.push(f64::INFINITY);
                rec.xs_running.push(f64::INFINITY);
                rec.dt_used.push(dt);
                break;
            }
            Err(e) => return Err(e),
        }
        rec.dt_used.push(dt);
        let l2 = sobolev_norm(&state.u, 0.0);
        rec.push(state.t, l2, sobolev_norm(&state.u, config.s), config.gamma, config.s);
        observe(&state);
        if l2 > stop_level {
            rec.stop = StopReason::Threshold;
            break;
        }
    }
    rec.lifespan_estimate = detect_blowup(&rec, &config.blowup);
    rec.blowup_flag = rec.lifespan_estimate.is_some();
    rec.lifespan_high_threshold = blowup::crossing(&rec, config.blowup.stop_factor());
    Ok(rec)
}
