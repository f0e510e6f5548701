use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite_core::{multiplicity, HermiteBasisSpec};

use super::grid::LambdaGrid;

/// Diagonal coefficients c[k][j] of a z-radial field, k ≤ k_max, j over all λ nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub basis: HermiteBasisSpec,
    pub grid: Arc<LambdaGrid>,
    /// Row-major, `coeffs[k * grid.len() + j]`.
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(basis: HermiteBasisSpec, grid: Arc<LambdaGrid>) -> Self {
        let len = basis.degrees() * grid.len();
        Self {
            basis,
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn degrees(&self) -> usize {
        self.basis.degrees()
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.coeffs[k * self.grid.len() + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, j: usize, v: Complex64) {
        let nj = self.grid.len();
        self.coeffs[k * nj + j] = v;
    }

    /// Sets c[k](λ_m) and its mirror conj at −λ_m.
    #[inline]
    pub fn set_pair(&mut self, k: usize, m: usize, v: Complex64) {
        let jp = self.grid.j_pos(m);
        let jn = self.grid.j_neg(m);
        self.set(k, jp, v);
        self.set(k, jn, v.conj());
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.basis == other.basis && Arc::ptr_eq(&self.grid, &other.grid)
            || (self.basis == other.basis && *self.grid == *other.grid)
    }

    pub fn check_layout(&self, other: &Self) -> Result<()> {
        if !self.same_layout(other) {
            return Err(Error::invalid("fields do not share basis and grid"));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// self + a * other
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(x, y)| *x += a * y);
        out
    }

    /// Multiplicity d_k of the degree-k eigenspace (1 for n = 1).
    pub fn multiplicity(&self, k: usize) -> f64 {
        multiplicity(k, self.basis.n)
    }

    /// Plancherel-weighted size of the part violating c(−λ) = conj c(λ),
    /// relative to the symmetric part.
    pub fn symmetry_defect(&self) -> f64 {
        let w = self.grid.positive_weights();
        let (mut anti, mut sym) = (0.0, 0.0);
        for k in 0..self.degrees() {
            let d = self.multiplicity(k);
            for (m, wm) in w.iter().enumerate() {
                let a = self.get(k, self.grid.j_pos(m));
                let b = self.get(k, self.grid.j_neg(m)).conj();
                anti += d * wm * (a - b).norm_sqr();
                sym += d * wm * (a + b).norm_sqr();
            }
        }
        if sym == 0.0 {
            if anti == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (anti / sym).sqrt()
        }
    }

    /// Projects onto the reality-symmetric subspace.
    pub fn symmetrize(&mut self) {
        for k in 0..self.degrees() {
            for m in 0..self.grid.half_len() {
                let a = self.get(k, self.grid.j_pos(m));
                let b = self.get(k, self.grid.j_neg(m)).conj();
                self.set_pair(k, m, 0.5 * (a + b));
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }
}
