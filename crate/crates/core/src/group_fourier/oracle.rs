//! Slow transforms built directly on the u-quadrature matrix coefficients.
//! They share nothing with the Laguerre fast path and exist to validate it.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite_core::{hermite_all_into, multiplicity, HermiteBasisSpec};

use super::coefficient::{block_1d, signed_sqrt};
use super::field::SpectralField;
use super::grid::{LambdaGrid, PhysicalField};
use std::sync::Arc;

/// Diagonal entries M[k][k] of the 1-D block, k < size.
pub fn diagonal_1d(
    basis: &HermiteBasisSpec,
    lambda: f64,
    x: f64,
    y: f64,
    size: usize,
) -> Result<Vec<Complex64>> {
    let h = basis.step();
    let freq = signed_sqrt(lambda) * y;
    if freq.abs() * h > std::f64::consts::FRAC_PI_2 {
        return Err(Error::GridTooSmall("unresolved oscillation".into()));
    }
    let half = 0.5 * lambda.abs().sqrt() * x;
    let w = basis.weights();
    let lim = basis.u_halfwidth;
    let mut hp = vec![0.0; size];
    let mut hm = vec![0.0; size];
    let mut out = vec![Complex64::new(0.0, 0.0); size];
    for (i, v) in basis.nodes().iter().enumerate() {
        // beyond ±L one factor is below the basis tail bound
        if (v + half).abs() > lim || (v - half).abs() > lim {
            continue;
        }
        hermite_all_into(v + half, &mut hp);
        hermite_all_into(v - half, &mut hm);
        let ph = Complex64::from_polar(w[i], freq * v);
        for k in 0..size {
            out[k] += ph * (hp[k] * hm[k]);
        }
    }
    Ok(out)
}

/// Σ_{|κ|=m} (π_λ(g) e_κ, e_κ) at g = ((r,0,..), 0, 0), for m ≤ k_max,
/// by summing 1-D coefficients over multi-indices.
fn block_traces(basis: &HermiteBasisSpec, lambda: f64, r: f64) -> Result<Vec<Complex64>> {
    let kk = basis.degrees();
    let d1 = diagonal_1d(basis, lambda, r, 0.0, kk)?;
    let n = basis.n;
    Ok((0..kk)
        .map(|m| {
            if n == 1 {
                return d1[m];
            }
            // remaining n-1 coordinates sit at the identity: each contributes 1,
            // and there are C(m - k1 + n - 2, n - 2) ways to spread the degree.
            (0..=m)
                .map(|k1| d1[k1] * multiplicity(m - k1, n - 1))
                .sum()
        })
        .collect())
}

/// Forward transform by direct quadrature: ∫ f conj(matrix coefficient) dg.
pub fn forward_quadrature(
    f: &PhysicalField,
    basis: &HermiteBasisSpec,
    lgrid: Arc<LambdaGrid>,
) -> Result<SpectralField> {
    Ok(forward_quadrature_many(&[f], basis, lgrid)?.remove(0))
}

/// As [`forward_quadrature`] for several fields on one grid, sharing the
/// matrix-coefficient evaluations.
pub fn forward_quadrature_many(
    fields: &[&PhysicalField],
    basis: &HermiteBasisSpec,
    lgrid: Arc<LambdaGrid>,
) -> Result<Vec<SpectralField>> {
    let pg = &fields[0].grid;
    if fields.iter().any(|f| f.grid != *pg) {
        return Err(Error::invalid("fields must share one physical grid"));
    }
    let nodes = lgrid.nodes();
    let tau = pg.tau_nodes();
    let tw = pg.tau_weights();
    let nt = pg.ntau();
    let kk = basis.degrees();
    let nf = fields.len();
    let cols: Vec<Vec<Vec<Complex64>>> = nodes
        .par_iter()
        .map(|&lam| -> Result<Vec<Vec<Complex64>>> {
            let phase: Vec<Complex64> = tau
                .iter()
                .zip(tw)
                .map(|(t, w)| Complex64::from_polar(*w, -lam * t))
                .collect();
            let mut acc = vec![vec![Complex64::new(0.0, 0.0); kk]; nf];
            for (i, &r) in pg.r.nodes.iter().enumerate() {
                let fts: Vec<Complex64> = fields
                    .iter()
                    .map(|f| {
                        let row = &f.values[i * nt..(i + 1) * nt];
                        row.iter().zip(&phase).map(|(v, p)| p * v).sum()
                    })
                    .collect();
                if fts.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                    continue;
                }
                let tr = block_traces(basis, lam, r)?;
                for (a, ft) in acc.iter_mut().zip(&fts) {
                    for k in 0..kk {
                        a[k] += pg.r_measure()[i] * ft * tr[k].conj();
                    }
                }
            }
            for a in acc.iter_mut() {
                for (k, v) in a.iter_mut().enumerate() {
                    *v /= multiplicity(k, basis.n);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out = vec![SpectralField::zeros(basis.clone(), lgrid); nf];
    for (j, col) in cols.into_iter().enumerate() {
        for (fi, c) in col.into_iter().enumerate() {
            for (k, v) in c.into_iter().enumerate() {
                out[fi].set(k, j, v);
            }
        }
    }
    Ok(out)
}

/// Inverse transform by direct quadrature on the target grid.
pub fn inverse_quadrature(spec: &SpectralField, target: &PhysicalField) -> Result<PhysicalField> {
    let pg = target.grid.clone();
    let nodes = spec.grid.nodes();
    let w = spec.grid.weights();
    let kk = spec.degrees();
    let tau = pg.tau_nodes().to_vec();
    let rows: Vec<Vec<Complex64>> = pg
        .r
        .nodes
        .par_iter()
        .map(|&r| -> Result<Vec<Complex64>> {
            let mut row = vec![Complex64::new(0.0, 0.0); tau.len()];
            for (j, &lam) in nodes.iter().enumerate() {
                let tr = block_traces(&spec.basis, lam, r)?;
                let g: Complex64 = (0..kk).map(|k| spec.get(k, j) * tr[k]).sum();
                for (l, t) in tau.iter().enumerate() {
                    row[l] += w[j] * g * Complex64::from_polar(1.0, lam * t);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let flat: Vec<Complex64> = rows.concat();
    let re_max = flat.iter().fold(0.0f64, |a, c| a.max(c.re.abs()));
    let im_max = flat.iter().fold(0.0f64, |a, c| a.max(c.im.abs()));
    if im_max > 1e-6 * re_max.max(f64::MIN_POSITIVE) {
        return Err(Error::Symmetry(im_max / re_max.max(f64::MIN_POSITIVE)));
    }
    Ok(PhysicalField {
        grid: pg,
        values: flat.into_iter().map(|c| c.re).collect(),
    })
}

/// Worst off-diagonal entry of ∫ f conj(matrix coefficient) dg over the given
/// λ nodes, relative to the largest diagonal entry (n = 1). The z-plane
/// angle is integrated with `angles` trapezoid points.
pub fn off_diagonal_residual(
    f: &PhysicalField,
    basis: &HermiteBasisSpec,
    lambdas: &[f64],
    size: usize,
    angles: usize,
) -> Result<f64> {
    if basis.n != 1 {
        return Err(Error::invalid("off-diagonal oracle is implemented for n = 1"));
    }
    let pg = &f.grid;
    let tau = pg.tau_nodes();
    let tw = pg.tau_weights();
    let nt = pg.ntau();
    let dtheta = 2.0 * std::f64::consts::PI / angles as f64;
    let per: Vec<(f64, f64)> = lambdas
        .par_iter()
        .map(|&lam| -> Result<(f64, f64)> {
            let mut acc = vec![vec![Complex64::new(0.0, 0.0); size]; size];
            for (i, &r) in pg.r.nodes.iter().enumerate() {
                let row = &f.values[i * nt..(i + 1) * nt];
                let ft: Complex64 = row
                    .iter()
                    .zip(tau.iter().zip(tw))
                    .map(|(v, (t, w))| Complex64::from_polar(w * v, -lam * t))
                    .sum();
                if ft == Complex64::new(0.0, 0.0) {
                    continue;
                }
                // the polar measure of the plan is 2π r w_r; here the angle is explicit
                let rad = pg.r.weights[i] * r;
                for a in 0..angles {
                    let th = a as f64 * dtheta;
                    let b = block_1d(basis, lam, r * th.cos(), r * th.sin(), size)?;
                    for k in 0..size {
                        for l in 0..size {
                            acc[k][l] += rad * dtheta * ft * b[k][l].conj();
                        }
                    }
                }
            }
            let mut diag: f64 = 0.0;
            let mut off: f64 = 0.0;
            for k in 0..size {
                for l in 0..size {
                    if k == l {
                        diag = diag.max(acc[k][l].norm());
                    } else {
                        off = off.max(acc[k][l].norm());
                    }
                }
            }
            Ok((diag, off))
        })
        .collect::<Result<_>>()?;
    let diag = per.iter().fold(0.0f64, |a, p| a.max(p.0));
    let off = per.iter().fold(0.0f64, |a, p| a.max(p.1));
    if diag == 0.0 {
        return Err(Error::invalid("field has no diagonal mass on these nodes"));
    }
    Ok(off / diag)
}
