//! Matrix coefficients (π_λ(g) e_k, e_ℓ) of the Schrödinger representation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite_core::{hermite_all_into, HermiteBasisSpec};

const TAIL_TOLERANCE: f64 = 1e-10;

/// A point (x, y, τ) of H^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub tau: f64,
}

impl GroupPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, tau: f64) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::invalid("x and y must have the same positive length"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) || !tau.is_finite() {
            return Err(Error::invalid("group point has non-finite coordinates"));
        }
        Ok(Self { x, y, tau })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; n],
            tau: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// (x,y,τ)∘(x',y',τ') = (x+x', y+y', τ+τ' + (x·y' − x'·y)/2).
    pub fn compose(&self, o: &Self) -> Self {
        let twist: f64 = self
            .x
            .iter()
            .zip(&o.y)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            - o.x.iter().zip(&self.y).map(|(a, b)| a * b).sum::<f64>();
        Self {
            x: self.x.iter().zip(&o.x).map(|(a, b)| a + b).collect(),
            y: self.y.iter().zip(&o.y).map(|(a, b)| a + b).collect(),
            tau: self.tau + o.tau + 0.5 * twist,
        }
    }

    /// Korányi gauge ((|x|²+|y|²)² + τ²)^{1/4}.
    pub fn koranyi(&self) -> f64 {
        let z2: f64 = self.x.iter().chain(&self.y).map(|v| v * v).sum();
        (z2 * z2 + self.tau * self.tau).powf(0.25)
    }
}

/// sgn(λ)√|λ|.
pub fn signed_sqrt(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().sqrt()
}

/// One-dimensional block M[k][ℓ] = ∫ e^{i√λ y u} h_k(u + √|λ|x) h_ℓ(u) du, k, ℓ < size.
///
/// Evaluated after the shift u = v − √|λ|x/2, which cancels the e^{iλxy/2}
/// phase and keeps both factors centred on the grid.
pub fn block_1d(
    basis: &HermiteBasisSpec,
    lambda: f64,
    x: f64,
    y: f64,
    size: usize,
) -> Result<Vec<Vec<Complex64>>> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("lambda must be finite and nonzero"));
    }
    let h = basis.step();
    let freq = signed_sqrt(lambda) * y;
    if freq.abs() * h > std::f64::consts::FRAC_PI_2 {
        return Err(Error::GridTooSmall(format!(
            "oscillation √λ·y = {freq:.3} unresolved by u step {h:.3}"
        )));
    }
    let half = 0.5 * lambda.abs().sqrt() * x;
    let nodes = basis.nodes();
    let w = basis.weights();
    let mut hp = vec![0.0; size];
    let mut hm = vec![0.0; size];
    let mut out = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut edge: f64 = 0.0;
    let last = nodes.len() - 1;
    for (i, v) in nodes.iter().enumerate() {
        hermite_all_into(v + half, &mut hp);
        hermite_all_into(v - half, &mut hm);
        if i == 0 || i == last {
            for a in &hp {
                for b in &hm {
                    edge = edge.max((a * b).abs());
                }
            }
        }
        let ph = Complex64::from_polar(w[i], freq * v);
        for (k, a) in hp.iter().enumerate() {
            let pa = ph * a;
            for (l, b) in hm.iter().enumerate() {
                out[k][l] += pa * b;
            }
        }
    }
    if edge > TAIL_TOLERANCE {
        return Err(Error::GridTooSmall(format!(
            "shifted argument leaves the truncated interval (edge integrand {edge:.2e})"
        )));
    }
    Ok(out)
}

/// (π_λ(g) e_k, e_ℓ) for multi-indices k, ℓ of length n.
pub fn matrix_coefficient_multi(
    basis: &HermiteBasisSpec,
    lambda: f64,
    g: &GroupPoint,
    k: &[usize],
    l: &[usize],
) -> Result<Complex64> {
    if g.n() != basis.n || k.len() != basis.n || l.len() != basis.n {
        return Err(Error::invalid("dimension mismatch between point, indices and basis"));
    }
    let size = k.iter().chain(l).copied().max().unwrap_or(0) + 1;
    if size > basis.k_max + 1 {
        return Err(Error::invalid("degree beyond k_max"));
    }
    let mut acc = Complex64::from_polar(1.0, lambda * g.tau);
    for j in 0..basis.n {
        let b = block_1d(basis, lambda, g.x[j], g.y[j], size)?;
        acc *= b[k[j]][l[j]];
    }
    Ok(acc)
}

/// (π_λ(g) e_k, e_ℓ) with scalar degrees; for n > 1 the indices are read as
/// (k, 0, ..., 0) and (ℓ, 0, ..., 0).
pub fn matrix_coefficient(
    basis: &HermiteBasisSpec,
    lambda: f64,
    g: &GroupPoint,
    k: usize,
    l: usize,
) -> Result<Complex64> {
    if k > basis.k_max || l > basis.k_max {
        return Err(Error::invalid("degree beyond k_max"));
    }
    let mut kk = vec![0; basis.n];
    let mut ll = vec![0; basis.n];
    kk[0] = k;
    ll[0] = l;
    matrix_coefficient_multi(basis, lambda, g, &kk, &ll)
}

/// Fills `out[m] = L_m^{(alpha)}(s) e^{-s/2}`.
pub fn laguerre_functions_into(alpha: f64, s: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let e = (-0.5 * s).exp();
    out[0] = e;
    if out.len() == 1 {
        return;
    }
    out[1] = (1.0 + alpha - s) * e;
    for m in 1..out.len() - 1 {
        let mf = m as f64;
        out[m + 1] = ((2.0 * mf + 1.0 + alpha - s) * out[m] - (mf + alpha) * out[m - 1]) / (mf + 1.0);
    }
}

/// Trace of the degree-m block of π_λ at a point with |z| = r:
/// e^{iλτ} L_m^{(n-1)}(|λ|r²/2) e^{-|λ|r²/4}.
pub fn radial_trace(lambda: f64, r: f64, tau: f64, m: usize, n: usize) -> Complex64 {
    let mut l = vec![0.0; m + 1];
    laguerre_functions_into(n as f64 - 1.0, 0.5 * lambda.abs() * r * r, &mut l);
    Complex64::from_polar(l[m], lambda * tau)
}
