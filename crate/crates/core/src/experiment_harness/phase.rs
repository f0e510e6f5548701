//! Bounded-horizon classification of (γ, p) cells.

use serde::{Deserialize, Serialize};

use crate::analysis_lab::{critical_exponent, regularity_exponent};
use crate::error::Result;
use crate::nonlinear_solver::{blowup_data, run_nonlinear, NonlinearGridSpec, Nonlinearity, RunConfig};
use crate::spectral_field::DataProfileSpec;

use super::manifest::Resolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Decaying,
    Growing,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub gamma: f64,
    pub p: f64,
    pub class: CellClass,
    pub p_crit: f64,
    pub p_regularity: f64,
    pub lifespan: Option<f64>,
    /// xs_running at the horizon over its value at t = 1.
    pub xs_growth: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSettings {
    pub horizon: f64,
    pub r_max: f64,
    pub tau_max: f64,
}

impl Default for PhaseSettings {
    fn default() -> Self {
        Self {
            horizon: 100.0,
            r_max: 20.0,
            tau_max: 200.0,
        }
    }
}

/// Growing: blow-up detected or X_s grew more than 4×; decaying: no blow-up
/// and X_s within 2× of its t = 1 value; inconclusive otherwise.
pub fn classify_cell(
    q: usize,
    gamma: f64,
    p: f64,
    eps: f64,
    res: &Resolution,
    settings: &PhaseSettings,
) -> Result<PhaseCell> {
    let n = (q - 2) / 2;
    let profile = DataProfileSpec::new(res.c0, q, gamma)?;
    let grids = NonlinearGridSpec::for_box(n, res.k_max, settings.r_max, settings.tau_max, res.lambda_max);
    let (plan, data) = blowup_data(&profile, &grids, eps)?;
    let mut cfg = RunConfig::new(p, gamma, 1.0, settings.horizon);
    cfg.dt.dt0 = res.dt0;
    let rec = run_nonlinear(&data, Nonlinearity::new(plan, p)?, &cfg)?;
    let at1 = rec.xs_at(1.0).unwrap_or(rec.xs_running[0]);
    let last = *rec.xs_running.last().unwrap();
    let growth = last / at1;
    let class = if rec.blowup_flag || growth > 4.0 {
        CellClass::Growing
    } else if growth < 2.0 {
        CellClass::Decaying
    } else {
        CellClass::Inconclusive
    };
    let qf = q as f64;
    Ok(PhaseCell {
        gamma,
        p,
        class,
        p_crit: critical_exponent(qf, gamma),
        p_regularity: regularity_exponent(qf, gamma),
        lifespan: rec.lifespan_estimate,
        xs_growth: Some(growth),
    })
}

pub fn phase_diagram(
    q: usize,
    gammas: &[f64],
    ps: &[f64],
    eps: f64,
    res: &Resolution,
    settings: &PhaseSettings,
) -> Vec<PhaseCell> {
    let mut out = Vec::new();
    for &g in gammas {
        for &p in ps {
            let cell = classify_cell(q, g, p, eps, res, settings).unwrap_or(PhaseCell {
                gamma: g,
                p,
                class: CellClass::Inconclusive,
                p_crit: critical_exponent(q as f64, g),
                p_regularity: regularity_exponent(q as f64, g),
                lifespan: None,
                xs_growth: None,
            });
            out.push(cell);
        }
    }
    out
}
