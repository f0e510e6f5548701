//! Gagliardo–Nirenberg and Hardy–Littlewood–Sobolev ratios on sampled fields.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_fourier::{PhysicalField, PhysicalGrid, TransformPlan};
use crate::spectral_field::sobolev_norm;

use super::exponents::gn_theta;

const ZERO_GUARD: f64 = 1e-14;

fn homogeneous_dim(plan: &TransformPlan) -> f64 {
    (2 * plan.basis.n + 2) as f64
}

/// ‖f‖_q / (‖f‖_{Ḣ^s}^θ ‖f‖_2^{1−θ}) with r = 2.
pub fn gn_ratio(plan: &TransformPlan, f: &PhysicalField, q: f64, s: f64) -> Result<f64> {
    let (theta, ok) = gn_theta(q, s, 2.0, homogeneous_dim(plan))?;
    if !ok {
        return Err(Error::Precondition(format!(
            "(q, s) = ({q}, {s}) is not admissible"
        )));
    }
    let l2 = f.l2_norm();
    if l2 < ZERO_GUARD {
        return Err(Error::invalid("field norm below the zero guard"));
    }
    let spec = plan.forward(f)?;
    let hs = sobolev_norm(&spec, s);
    Ok(f.lq_norm(q) / (hs.powf(theta) * l2.powf(1.0 - theta)))
}

/// ‖f‖_{Ḣ^{−a}} / ‖f‖_{p_in} with a = Q(1/p_in − 1/2).
pub fn hls_ratio(plan: &TransformPlan, f: &PhysicalField, a: f64, p_in: f64) -> Result<f64> {
    let q = homogeneous_dim(plan);
    if !(p_in > 1.0 && p_in < 2.0) {
        return Err(Error::Precondition(format!("p = {p_in} outside (1, 2)")));
    }
    let expected = q * (1.0 / p_in - 0.5);
    if (a - expected).abs() > 1e-9 * expected.max(1.0) || !(a > 0.0 && a < q / 2.0) {
        return Err(Error::Precondition(format!(
            "a = {a} must equal Q(1/p − 1/2) = {expected} in (0, Q/2)"
        )));
    }
    let lp = f.lq_norm(p_in);
    if lp < ZERO_GUARD {
        return Err(Error::invalid("field norm below the zero guard"));
    }
    let spec = plan.forward(f)?;
    Ok(sobolev_norm(&spec, -a) / lp)
}

/// Sum of three shifted Gaussians in (r², τ) with random widths and signs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothSample {
    pub amp: [f64; 3],
    pub width_r: [f64; 3],
    pub width_tau: [f64; 3],
    pub shift_tau: [f64; 3],
}

impl SmoothSample {
    pub fn value(&self, r: f64, tau: f64) -> f64 {
        (0..3)
            .map(|i| {
                let dt = tau - self.shift_tau[i];
                // even in τ so only cosine content appears
                let dt2 = tau + self.shift_tau[i];
                self.amp[i]
                    * (-(r * r) / self.width_r[i]).exp()
                    * 0.5
                    * ((-(dt * dt) / self.width_tau[i]).exp() + (-(dt2 * dt2) / self.width_tau[i]).exp())
            })
            .sum()
    }

    pub fn sample(&self, grid: Arc<PhysicalGrid>) -> Result<PhysicalField> {
        PhysicalField::from_fn(grid, |r, t| self.value(r, t))
    }
}

/// Deterministic family of `count` smooth samples.
pub fn random_family(seed: u64, count: usize) -> Vec<SmoothSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut s = SmoothSample {
                amp: [0.0; 3],
                width_r: [0.0; 3],
                width_tau: [0.0; 3],
                shift_tau: [0.0; 3],
            };
            for i in 0..3 {
                s.amp[i] = rng.gen_range(-1.0..1.0);
                s.width_r[i] = rng.gen_range(0.5..2.0);
                s.width_tau[i] = rng.gen_range(0.5..2.0);
                s.shift_tau[i] = rng.gen_range(-1.5..1.5);
            }
            s.amp[0] = s.amp[0].abs() + 0.5;
            s
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMaxima {
    pub gn_max: f64,
    pub hls_max: f64,
    pub gn: Vec<f64>,
    pub hls: Vec<f64>,
}

/// GN ratio (q, s) and HLS ratio at p_in over the family on one plan.
pub fn family_maxima(
    plan: &TransformPlan,
    family: &[SmoothSample],
    q: f64,
    s: f64,
    p_in: f64,
) -> Result<FamilyMaxima> {
    let a = homogeneous_dim(plan) * (1.0 / p_in - 0.5);
    let mut gn = Vec::with_capacity(family.len());
    let mut hls = Vec::with_capacity(family.len());
    for f in family {
        let field = f.sample(plan.pgrid.clone())?;
        gn.push(gn_ratio(plan, &field, q, s)?);
        hls.push(hls_ratio(plan, &field, a, p_in)?);
    }
    Ok(FamilyMaxima {
        gn_max: gn.iter().cloned().fold(0.0, f64::max),
        hls_max: hls.iter().cloned().fold(0.0, f64::max),
        gn,
        hls,
    })
}
