//! Precomputed fast transforms between a physical (r, τ) grid and a λ grid.
//!
//! Per λ fiber the τ integral is a cosine/sine sum over the half axis and
//! the r integral a Laguerre transform, using the closed form of the
//! diagonal matrix coefficients.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite_core::{multiplicity, HermiteBasisSpec};

use super::coefficient::laguerre_functions_into;
use super::field::SpectralField;
use super::grid::{LambdaGrid, PhysicalField, PhysicalGrid};

/// Symmetry defect tolerated before an inverse transform is refused.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

/// How the τ integral of the forward transform is discretized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauRule {
    /// The physical grid's own weights times e^{-iλτ} at the nodes.
    #[default]
    Pointwise,
    /// Exact integration of the piecewise-quadratic interpolant against
    /// e^{-iλτ}; stays accurate when the oscillation outruns the grid.
    Filon,
}

pub struct TransformPlan {
    pub basis: HermiteBasisSpec,
    pub lgrid: Arc<LambdaGrid>,
    pub pgrid: Arc<PhysicalGrid>,
    pub rule: TauRule,
    mm: usize,
    kk: usize,
    nr: usize,
    nh: usize,
    fwd_cos: Vec<f64>,
    fwd_sin: Vec<f64>,
    inv_cos: Vec<f64>,
    inv_sin: Vec<f64>,
    lag: Vec<f64>,
    inv_d: Vec<f64>,
}

impl std::fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformPlan")
            .field("lambda_nodes", &self.mm)
            .field("degrees", &self.kk)
            .field("nr", &self.nr)
            .field("ntau_half", &self.nh)
            .field("rule", &self.rule)
            .finish()
    }
}

fn moments(theta: f64) -> [Complex64; 3] {
    let i = Complex64::new(0.0, 1.0);
    if theta.abs() < 1.0 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let z = i * theta;
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..24 {
            for (j, o) in out.iter_mut().enumerate() {
                *o += term / (k + j + 1) as f64;
            }
            term = term * z / (k + 1) as f64;
        }
        out
    } else {
        let z = i * theta;
        let e = z.exp();
        let m0 = (e - 1.0) / z;
        let m1 = (e - m0) / z;
        let m2 = (e - 2.0 * m1) / z;
        [m0, m1, m2]
    }
}

/// Weights W_l with ∫_0^T g(τ) e^{iλτ} dτ ≈ Σ W_l g(τ_l), exact for the
/// panelwise quadratic interpolant.
fn filon_weights(nodes: &[f64], lambda: f64) -> Vec<Complex64> {
    let mut w = vec![Complex64::new(0.0, 0.0); nodes.len()];
    let mut p = 0;
    while p + 2 < nodes.len() {
        let a = nodes[p];
        let hh = nodes[p + 2] - a;
        let s = (nodes[p + 1] - a) / hh;
        let [m0, m1, m2] = moments(lambda * hh);
        let base = Complex64::from_polar(hh, lambda * a);
        w[p] += base * (m2 - (1.0 + s) * m1 + s * m0) / s;
        w[p + 1] += base * (m2 - m1) / (s * (s - 1.0));
        w[p + 2] += base * (m2 - s * m1) / (1.0 - s);
        p += 2;
    }
    w
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let o = 4 * c;
        acc[0] += a[o] * b[o];
        acc[1] += a[o + 1] * b[o + 1];
        acc[2] += a[o + 2] * b[o + 2];
        acc[3] += a[o + 3] * b[o + 3];
    }
    let mut s = acc[0] + acc[1] + acc[2] + acc[3];
    for o in 4 * chunks..a.len() {
        s += a[o] * b[o];
    }
    s
}

impl TransformPlan {
    pub fn new(
        basis: HermiteBasisSpec,
        lgrid: Arc<LambdaGrid>,
        pgrid: Arc<PhysicalGrid>,
        rule: TauRule,
    ) -> Result<Self> {
        if basis.n != lgrid.n || basis.n != pgrid.n {
            return Err(Error::invalid("basis, λ grid and physical grid disagree on n"));
        }
        if pgrid.tau_half.len().is_multiple_of(2) && rule == TauRule::Filon {
            return Err(Error::invalid("Filon rule needs an odd τ half-axis node count"));
        }
        let mm = lgrid.half_len();
        let kk = basis.degrees();
        let nr = pgrid.nr();
        let nh = pgrid.tau_half.len();
        let lam = lgrid.positive_nodes();
        let wl = lgrid.positive_weights();
        let tau = &pgrid.tau_half.nodes;

        let mut fwd_cos = vec![0.0; mm * nh];
        let mut fwd_sin = vec![0.0; mm * nh];
        for m in 0..mm {
            let row = match rule {
                TauRule::Pointwise => tau
                    .iter()
                    .zip(&pgrid.tau_half.weights)
                    .map(|(t, w)| Complex64::from_polar(*w, lam[m] * t))
                    .collect::<Vec<_>>(),
                TauRule::Filon => filon_weights(tau, lam[m]),
            };
            for (l, c) in row.iter().enumerate() {
                fwd_cos[m * nh + l] = c.re;
                fwd_sin[m * nh + l] = c.im;
            }
        }
        let mut inv_cos = vec![0.0; nh * mm];
        let mut inv_sin = vec![0.0; nh * mm];
        for l in 0..nh {
            for m in 0..mm {
                let (s, c) = (lam[m] * tau[l]).sin_cos();
                inv_cos[l * mm + m] = 2.0 * wl[m] * c;
                inv_sin[l * mm + m] = 2.0 * wl[m] * s;
            }
        }
        let alpha = basis.n as f64 - 1.0;
        let mut lag = vec![0.0; mm * kk * nr];
        let mut col = vec![0.0; kk];
        for m in 0..mm {
            for (i, r) in pgrid.r.nodes.iter().enumerate() {
                laguerre_functions_into(alpha, 0.5 * lam[m] * r * r, &mut col);
                for k in 0..kk {
                    lag[(m * kk + k) * nr + i] = col[k];
                }
            }
        }
        let inv_d = (0..kk).map(|k| 1.0 / multiplicity(k, basis.n)).collect();
        Ok(Self {
            basis,
            lgrid,
            pgrid,
            rule,
            mm,
            kk,
            nr,
            nh,
            fwd_cos,
            fwd_sin,
            inv_cos,
            inv_sin,
            lag,
            inv_d,
        })
    }

    fn check_physical(&self, f: &PhysicalField) -> Result<()> {
        if !(Arc::ptr_eq(&f.grid, &self.pgrid) || *f.grid == *self.pgrid) {
            return Err(Error::invalid("field is not on the plan's physical grid"));
        }
        Ok(())
    }

    fn check_spectral(&self, f: &SpectralField) -> Result<()> {
        if f.basis.k_max != self.basis.k_max
            || f.basis.n != self.basis.n
            || !(Arc::ptr_eq(&f.grid, &self.lgrid) || *f.grid == *self.lgrid)
        {
            return Err(Error::invalid("field is not on the plan's spectral layout"));
        }
        Ok(())
    }

    pub fn zero_spectral(&self) -> SpectralField {
        SpectralField::zeros(self.basis.clone(), self.lgrid.clone())
    }

    /// c[k](λ) = (1/d_k) ∫ f conj(trace_k(λ, g)) dg.
    pub fn forward(&self, f: &PhysicalField) -> Result<SpectralField> {
        self.check_physical(f)?;
        let (nr, nh, kk) = (self.nr, self.nh, self.kk);
        let mut even = vec![0.0; nr * nh];
        let mut odd = vec![0.0; nr * nh];
        let mut has_odd = false;
        for i in 0..nr {
            for l in 0..nh {
                let a = f.at(i, self.pgrid.tau_index(l, false));
                let b = f.at(i, self.pgrid.tau_index(l, true));
                even[i * nh + l] = a + b;
                let o = a - b;
                odd[i * nh + l] = o;
                has_odd |= o != 0.0;
            }
        }
        let rmeas = self.pgrid.r_measure();
        let rows: Vec<Vec<Complex64>> = (0..self.mm)
            .into_par_iter()
            .with_min_len(8)
            .map(|m| {
                let fc = &self.fwd_cos[m * nh..(m + 1) * nh];
                let fs = &self.fwd_sin[m * nh..(m + 1) * nh];
                let mut gre = vec![0.0; nr];
                let mut gim = vec![0.0; nr];
                for i in 0..nr {
                    gre[i] = rmeas[i] * dot(fc, &even[i * nh..(i + 1) * nh]);
                    if has_odd {
                        gim[i] = -rmeas[i] * dot(fs, &odd[i * nh..(i + 1) * nh]);
                    }
                }
                (0..kk)
                    .map(|k| {
                        let lg = &self.lag[(m * kk + k) * nr..(m * kk + k + 1) * nr];
                        let re = dot(lg, &gre);
                        let im = if has_odd { dot(lg, &gim) } else { 0.0 };
                        // conj of e^{iλτ} in the kernel: ∫ f e^{-iλτ}
                        Complex64::new(re, im) * self.inv_d[k]
                    })
                    .collect()
            })
            .collect();
        let mut out = self.zero_spectral();
        for (m, row) in rows.into_iter().enumerate() {
            for (k, c) in row.into_iter().enumerate() {
                out.set_pair(k, m, c);
            }
        }
        Ok(out)
    }

    /// f(r, τ) = Σ_j w_j Σ_k c[k](λ_j) trace_k(λ_j, (r, 0, τ)).
    pub fn inverse(&self, spec: &SpectralField) -> Result<PhysicalField> {
        self.check_spectral(spec)?;
        let defect = spec.symmetry_defect();
        if defect > SYMMETRY_TOLERANCE {
            return Err(Error::Symmetry(defect));
        }
        let (nr, nh, kk, mm) = (self.nr, self.nh, self.kk, self.mm);
        let grid = &self.lgrid;
        // G[m][i], complex
        let g_rows: Vec<(Vec<f64>, Vec<f64>)> = (0..mm)
            .into_par_iter()
            .with_min_len(8)
            .map(|m| {
                let mut gre = vec![0.0; nr];
                let mut gim = vec![0.0; nr];
                for k in 0..kk {
                    let c = 0.5 * (spec.get(k, grid.j_pos(m)) + spec.get(k, grid.j_neg(m)).conj());
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    let lg = &self.lag[(m * kk + k) * nr..(m * kk + k + 1) * nr];
                    for i in 0..nr {
                        gre[i] += c.re * lg[i];
                        gim[i] += c.im * lg[i];
                    }
                }
                (gre, gim)
            })
            .collect();
        let mut gt_re = vec![0.0; nr * mm];
        let mut gt_im = vec![0.0; nr * mm];
        let mut has_im = false;
        for (m, (gre, gim)) in g_rows.iter().enumerate() {
            for i in 0..nr {
                gt_re[i * mm + m] = gre[i];
                gt_im[i * mm + m] = gim[i];
                has_im |= gim[i] != 0.0;
            }
        }
        let nt = self.pgrid.ntau();
        let rows: Vec<Vec<f64>> = (0..nr)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0.0; nt];
                let gr = &gt_re[i * mm..(i + 1) * mm];
                let gi = &gt_im[i * mm..(i + 1) * mm];
                for l in 0..nh {
                    let a = dot(&self.inv_cos[l * mm..(l + 1) * mm], gr);
                    let b = if has_im {
                        dot(&self.inv_sin[l * mm..(l + 1) * mm], gi)
                    } else {
                        0.0
                    };
                    row[self.pgrid.tau_index(l, false)] = a - b;
                    row[self.pgrid.tau_index(l, true)] = a + b;
                }
                row
            })
            .collect();
        Ok(PhysicalField {
            grid: self.pgrid.clone(),
            values: rows.concat(),
        })
    }
}
