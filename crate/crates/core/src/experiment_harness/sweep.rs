//! Execution of manifests point by point, resumable through the record store.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis_lab::{
    blowup_sign_exponent, data_lower_bound_check, family_maxima, random_family, BumpSpec,
};
use crate::error::{Error, Result};
use crate::group_fourier::{LambdaGridSpec, PhysicalGridSpec, TauRule, TransformPlan};
use crate::hermite_core::quadrature::AxisSpec;
use crate::hermite_core::HermiteBasisSpec;
use crate::linear_propagator::{decay_experiment, DecaySpec};
use crate::spectral_field::DataProfileSpec;

use super::lifespan::{lifespan_point, LifespanSpec};
use super::manifest::{ExperimentKind, Resolution, SweepManifest};
use super::phase::{classify_cell, PhaseSettings};
use super::store::{ExperimentRecord, RecordStore, Status};

/// One grid point of a manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub key: String,
    pub parameters: Value,
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn enumerate_points(m: &SweepManifest) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    let mut add = |key: String, parameters: Value| out.push(SweepPoint { key, parameters });
    match m.kind {
        ExperimentKind::LinearDecay => {
            for &g in &m.gamma {
                for &s in &m.s {
                    add(format!("s={},gamma={}", fmt(s), fmt(g)), json!({"s": s, "gamma": g}));
                }
            }
        }
        ExperimentKind::Lifespan => {
            for &g in &m.gamma {
                for &p in &m.p {
                    for &e in &m.eps {
                        add(
                            format!("gamma={},p={},eps={}", fmt(g), fmt(p), fmt(e)),
                            json!({"gamma": g, "p": p, "eps": e}),
                        );
                    }
                }
            }
        }
        ExperimentKind::PhaseDiagram => {
            for &g in &m.gamma {
                for &p in &m.p {
                    add(
                        format!("gamma={},p={}", fmt(g), fmt(p)),
                        json!({"gamma": g, "p": p, "eps": m.eps[0]}),
                    );
                }
            }
        }
        ExperimentKind::Gn => {
            for &s in &m.s {
                add(format!("s={}", fmt(s)), json!({"s": s}));
            }
        }
        ExperimentKind::BlowupFunctional => {
            for &g in &m.gamma {
                for &r in &m.radii {
                    add(format!("gamma={},R={}", fmt(g), fmt(r)), json!({"gamma": g, "R": r}));
                }
            }
        }
    }
    out
}

fn num(v: &Value, name: &str) -> Result<f64> {
    v.get(name)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::invalid(format!("point is missing {name}")))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("output serializes")
}

/// Plan for the inequality laboratory; `level` 1 doubles every resolution.
/// λ_max stays below the τ Nyquist frequency π/Δτ of the level-0 grid.
pub fn lab_plan(n: usize, level: u32) -> Result<TransformPlan> {
    let f = 1usize << level;
    let basis = HermiteBasisSpec::for_degree(n, 48 * f)?;
    let lgrid = LambdaGridSpec::Log {
        lambda_min: 1e-4,
        lambda_max: 20.0,
        per_sign: 96 * f,
    }
    .build(n)?;
    let pgrid = PhysicalGridSpec {
        n,
        r: AxisSpec::uniform(6.0, 80 * f + 1),
        tau: AxisSpec::uniform(9.0, 90 * f + 1),
    }
    .build()?;
    TransformPlan::new(basis, lgrid.into(), pgrid.into(), TauRule::Pointwise)
}

/// Runs one point and returns (outputs, refinement diagnostics).
pub fn run_point(m: &SweepManifest, point: &SweepPoint) -> Result<(Value, Value)> {
    let pr = &point.parameters;
    let q = m.q;
    let n = (q - 2) / 2;
    let res: &Resolution = &m.resolution;
    match m.kind {
        ExperimentKind::LinearDecay => {
            let spec = DecaySpec::new(n, num(pr, "s")?, num(pr, "gamma")?);
            let fit = decay_experiment(&spec)?;
            let theory = spec.theory_slope();
            Ok((
                json!({
                    "slope": fit.slope,
                    "theory": theory,
                    "deviation": fit.slope - theory,
                    "intercept": fit.intercept,
                    "max_residual": fit.max_residual,
                    "fit_window": [fit.fit_window.0, fit.fit_window.1],
                    "trajectory": {"t": fit.times, "h_s_norm": fit.hs_norms, "l2_norm": fit.l2_norms},
                }),
                json!({"refinement_shift": fit.refinement_shift}),
            ))
        }
        ExperimentKind::Lifespan => {
            let spec = LifespanSpec {
                q,
                gamma: num(pr, "gamma")?,
                p: num(pr, "p")?,
                eps: m.eps.clone(),
                resolution: *res,
                certify_dt: res.certify_dt,
            };
            let pt = lifespan_point(&spec, num(pr, "eps")?)?;
            let refinement = json!({"threshold_shift": pt.threshold_shift, "dt_shift": pt.dt_shift});
            Ok((to_value(&pt), refinement))
        }
        ExperimentKind::PhaseDiagram => {
            let cell = classify_cell(
                q,
                num(pr, "gamma")?,
                num(pr, "p")?,
                num(pr, "eps")?,
                res,
                &PhaseSettings::default(),
            )?;
            Ok((to_value(&cell), json!({"horizon": PhaseSettings::default().horizon})))
        }
        ExperimentKind::Gn => {
            let s = num(pr, "s")?;
            let qf = q as f64;
            let q_exp = 2.0 * qf / (qf - 2.0 * s);
            let p_in = 4.0 / 3.0;
            let family = random_family(m.seed, 50);
            let base = family_maxima(&lab_plan(n, 0)?, &family, q_exp, s, p_in)?;
            let fine = family_maxima(&lab_plan(n, 1)?, &family, q_exp, s, p_in)?;
            let gn_drift = (fine.gn_max - base.gn_max).abs() / base.gn_max;
            let hls_drift = (fine.hls_max - base.hls_max).abs() / base.hls_max;
            Ok((
                json!({"q": q_exp, "s": s, "p_in": p_in, "gn_max": base.gn_max, "hls_max": base.hls_max}),
                json!({"gn_max_refined": fine.gn_max, "hls_max_refined": fine.hls_max,
                       "gn_drift": gn_drift, "hls_drift": hls_drift}),
            ))
        }
        ExperimentKind::BlowupFunctional => {
            let g = num(pr, "gamma")?;
            let profile = DataProfileSpec::new(res.c0, q, g)?;
            let chk = data_lower_bound_check(&profile, &BumpSpec::new(num(pr, "R")?)?)?;
            Ok((
                json!({"check": to_value(&chk), "holds": chk.margin >= 1.0,
                       "sign_exponent_at_p_crit": blowup_sign_exponent(q as f64, g,
                           crate::analysis_lab::critical_exponent(q as f64, g))}),
                Value::Null,
            ))
        }
    }
}

/// Executes every missing point with `workers` threads and returns the full
/// record set in enumeration order. Point failures are recorded, not raised.
pub fn run_sweep(m: &SweepManifest, workers: usize) -> Result<Vec<ExperimentRecord>> {
    m.validate()?;
    let hash = m.hash();
    let root = m.out_dir.clone().unwrap_or_else(|| PathBuf::from("runs"));
    let store = RecordStore::open(&root, &hash)?;
    let done = store.load()?;
    let points = enumerate_points(m);
    let todo: Vec<&SweepPoint> = points
        .iter()
        .filter(|p| !done.get(&p.key).is_some_and(|r| r.status == Status::Ok))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let fresh: Vec<Result<ExperimentRecord>> = pool.install(|| {
        todo.par_iter()
            .map(|p| {
                let clock = Instant::now();
                let outcome = run_point(m, p);
                let runtime = clock.elapsed().as_secs_f64();
                let (outputs, refinement, mut status) = match outcome {
                    Ok((o, r)) => (o, r, Status::Ok),
                    Err(e) => (Value::Null, Value::Null, Status::Failed { message: e.to_string() }),
                };
                if let Some(limit) = m.max_wall_seconds {
                    if runtime > limit && status == Status::Ok {
                        status = Status::Failed {
                            message: format!("wall time {runtime:.1}s over the {limit}s limit"),
                        };
                    }
                }
                let rec = ExperimentRecord {
                    manifest_hash: hash.clone(),
                    key: p.key.clone(),
                    parameters: p.parameters.clone(),
                    outputs,
                    refinement,
                    runtime_seconds: runtime,
                    status,
                };
                store.append(&rec)?;
                Ok(rec)
            })
            .collect()
    });
    let mut all = done;
    for r in fresh {
        let r = r?;
        all.insert(r.key.clone(), r);
    }
    Ok(points
        .iter()
        .filter_map(|p| all.remove(&p.key))
        .collect())
}
