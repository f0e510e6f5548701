//! ‖u − 𝒩u‖ on a stored trajectory, with 𝒩 the Duhamel map.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group_fourier::SpectralField;
use crate::hermite_core::hermite_eigenvalue;
use crate::linear_propagator::{propagate, CauchyData, StepWeights};
use crate::spectral_field::sobolev_norm;

use super::Nonlinearity;

/// Samples (t_i, u(t_i)) of a candidate solution.
#[derive(Clone, Debug, Default)]
pub struct StoredTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
}

impl StoredTrajectory {
    pub fn push(&mut self, t: f64, u: SpectralField) {
        self.times.push(t);
        self.states.push(u);
    }
}

fn weight_table(f: &SpectralField, h: f64) -> Vec<StepWeights> {
    let lam = f.grid.positive_nodes();
    (0..f.degrees())
        .flat_map(|k| {
            let mu = hermite_eigenvalue(k, f.basis.n) as f64;
            lam.iter().map(move |l| StepWeights::new(h, l * mu))
        })
        .collect()
}

/// Coefficients (c0, c1, c2) of the quadratic through three samples in the
/// local variable s = σ − x[0].
fn quadratic(x: [f64; 3], y: [num_complex::Complex64; 3]) -> [num_complex::Complex64; 3] {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let d012 = (d12 - d01) / (x[2] - x[0]);
    // y0 + d01 s + d012 s (s − (x1 − x0))
    let h1 = x[1] - x[0];
    [y[0], d01 - d012 * h1, d012]
}

fn weighted(f: &SpectralField, t: f64, gamma: f64, s: f64) -> f64 {
    (1.0 + t).powf(0.5 * gamma) * sobolev_norm(f, 0.0)
        + (1.0 + t).powf(0.5 * (s + gamma)) * sobolev_norm(f, s)
}

/// sup_i X_s-weight(u_i − 𝒩u(t_i)) / sup_i X_s-weight(u_i) over samples with
/// t_i ≤ t_end. The Duhamel integral is propagated exactly interval by
/// interval against the piecewise-quadratic interpolant of |u|^p.
pub fn picard_residual(
    traj: &StoredTrajectory,
    data: &CauchyData,
    nl: &Nonlinearity,
    gamma: f64,
    s: f64,
    t_end: f64,
) -> Result<f64> {
    let count = traj.times.iter().take_while(|t| **t <= t_end + 1e-12).count();
    if count < 3 || traj.times[0] != 0.0 {
        return Err(Error::invalid("trajectory needs >= 3 samples starting at t = 0"));
    }
    let times = &traj.times[..count];
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("trajectory times must increase"));
    }
    let nonlin: Vec<SpectralField> = traj.states[..count]
        .iter()
        .map(|u| nl.apply(u))
        .collect::<Result<_>>()?;
    let u0 = data.u0.scaled(data.eps);
    let u1 = data.u1.scaled(data.eps);
    let grid = u0.grid.clone();
    let (mm, nj, kk) = (grid.half_len(), grid.len(), u0.degrees());

    let mut d = u0.axpy(-1.0, &u0);
    let mut dv = d.clone();
    let mut tables: HashMap<u64, Vec<StepWeights>> = HashMap::new();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..count {
        let t = times[i];
        let lin = propagate(&u0, &u1, t).0;
        let resid = traj.states[i].axpy(-1.0, &lin).axpy(-1.0, &d);
        num = num.max(weighted(&resid, t, gamma, s));
        den = den.max(weighted(&traj.states[i], t, gamma, s));
        if i + 1 == count {
            break;
        }
        let h = times[i + 1] - t;
        let w = tables.entry(h.to_bits()).or_insert_with(|| weight_table(&u0, h));
        // interpolation stencil: this interval plus its right neighbour, or
        // the left one on the last interval
        let base = if i + 2 < count { i } else { i - 1 };
        let x = [times[base] - t, times[base + 1] - t, times[base + 2] - t];
        let mut nd = d.clone();
        let mut ndv = dv.clone();
        for k in 0..kk {
            for m in 0..mm {
                let sw = &w[k * mm + m];
                for j in [grid.j_pos(m), grid.j_neg(m)] {
                    let idx = k * nj + j;
                    let y = [
                        nonlin[base].coeffs[idx],
                        nonlin[base + 1].coeffs[idx],
                        nonlin[base + 2].coeffs[idx],
                    ];
                    // shift the polynomial to start at s = 0 (the interval start)
                    let [a0, a1, a2] = quadratic(x, y);
                    let (c0, c1, c2) = (
                        a0 - a1 * x[0] + a2 * x[0] * x[0],
                        a1 - 2.0 * a2 * x[0],
                        a2,
                    );
                    let (u, v) = (d.coeffs[idx], dv.coeffs[idx]);
                    nd.coeffs[idx] = sw.m.a0 * u + sw.m.a1 * v + c0 * sw.w0 + c1 * sw.w1 + c2 * sw.w2;
                    ndv.coeffs[idx] = sw.m.da0 * u
                        + sw.m.da1 * v
                        + c0 * sw.m.a1
                        + c1 * sw.w0
                        + c2 * 2.0 * sw.w1;
                }
            }
        }
        d = nd;
        dv = ndv;
    }
    if den == 0.0 {
        return Ok(num);
    }
    Ok(num / den)
}
