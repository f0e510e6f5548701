//! Normalized Hermite functions, Hermite-operator eigenvalues, and the
//! 1-D quadrature rules shared by the rest of the crate.

pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree the recurrences accept.
pub const DEGREE_CAP: usize = 512;

const TAIL_TOLERANCE: f64 = 1e-12;
const RESCALE: f64 = 1e200;

fn pi_quarter_inv() -> f64 {
    std::f64::consts::PI.powf(-0.25)
}

/// h_k(x) by the three-term recurrence on normalized functions.
pub fn hermite_eval(k: usize, x: f64) -> Result<f64> {
    if k > DEGREE_CAP {
        return Err(Error::DegreeCap { k, cap: DEGREE_CAP });
    }
    if !x.is_finite() {
        return Err(Error::invalid("hermite_eval: non-finite argument"));
    }
    let mut out = vec![0.0; k + 1];
    hermite_all_into(x, &mut out);
    Ok(out[k])
}

/// Fills `out[k] = h_k(x)` for `k < out.len()`.
///
/// The Gaussian factor is carried as a separate log-scale so that large
/// |x| does not underflow h_0 before the polynomial part has grown.
pub fn hermite_all_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = -0.5 * x * x;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = pi_quarter_inv();
    out[0] = cur * factor;
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
            factor = log_scale.exp();
        }
        out[k + 1] = cur * factor;
    }
}

/// μ_k = 2k + n.
pub fn hermite_eigenvalue(k: usize, n: usize) -> u64 {
    2 * k as u64 + n as u64
}

/// Discretization of the Hermite basis on a truncated uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasisSpec {
    pub n: usize,
    pub k_max: usize,
    pub u_halfwidth: f64,
    pub u_points: usize,
}

impl HermiteBasisSpec {
    pub fn new(n: usize, k_max: usize, u_halfwidth: f64, u_points: usize) -> Result<Self> {
        let spec = Self {
            n,
            k_max,
            u_halfwidth,
            u_points,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A spec wide enough for degree `k_max`, with the default node density.
    pub fn for_degree(n: usize, k_max: usize) -> Result<Self> {
        let turning = (2.0 * k_max as f64 + 1.0).sqrt();
        let l = (turning + 9.0).max(12.0);
        Self::new(n, k_max, l, (8 * k_max + 64).max(256))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("half-dimension n must be positive"));
        }
        if self.k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        if self.k_max > DEGREE_CAP {
            return Err(Error::DegreeCap {
                k: self.k_max,
                cap: DEGREE_CAP,
            });
        }
        if !(self.u_halfwidth.is_finite() && self.u_halfwidth > 0.0) {
            return Err(Error::invalid("u_halfwidth must be positive"));
        }
        if self.u_points < 4 * self.k_max {
            return Err(Error::invalid(format!(
                "u_points = {} < 4 k_max = {}",
                self.u_points,
                4 * self.k_max
            )));
        }
        let mut vals = vec![0.0; self.k_max + 1];
        hermite_all_into(self.u_halfwidth, &mut vals);
        if let Some(k) = vals.iter().position(|v| v.abs() >= TAIL_TOLERANCE) {
            return Err(Error::GridTooSmall(format!(
                "|e_{k}(L)| = {:.2e} at L = {}",
                vals[k].abs(),
                self.u_halfwidth
            )));
        }
        Ok(())
    }

    /// Homogeneous dimension Q = 2n + 2.
    pub fn q(&self) -> usize {
        2 * self.n + 2
    }

    pub fn degrees(&self) -> usize {
        self.k_max + 1
    }

    pub fn step(&self) -> f64 {
        2.0 * self.u_halfwidth / (self.u_points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.u_points)
            .map(|i| -self.u_halfwidth + i as f64 * h)
            .collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        quadrature::trapezoid_weights(self.u_points, self.step())
    }

    /// Row k holds e_k on the nodes.
    pub fn table(&self) -> Vec<Vec<f64>> {
        let mut rows = vec![vec![0.0; self.u_points]; self.degrees()];
        let mut col = vec![0.0; self.degrees()];
        for (i, u) in self.nodes().into_iter().enumerate() {
            hermite_all_into(u, &mut col);
            for (k, row) in rows.iter_mut().enumerate() {
                row[i] = col[k];
            }
        }
        rows
    }

    pub fn eigenvalues(&self) -> EigenvalueTable {
        EigenvalueTable::new(self.k_max, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueTable {
    pub mu: Vec<u64>,
}

impl EigenvalueTable {
    pub fn new(k_max: usize, n: usize) -> Self {
        Self {
            mu: (0..=k_max).map(|k| hermite_eigenvalue(k, n)).collect(),
        }
    }
}

/// Largest deviation of the quadrature Gram matrix from the identity.
pub fn orthonormality_defect(spec: &HermiteBasisSpec) -> f64 {
    let table = spec.table();
    let w = spec.weights();
    let mut worst: f64 = 0.0;
    for j in 0..table.len() {
        for k in j..table.len() {
            let ip: f64 = table[j]
                .iter()
                .zip(&table[k])
                .zip(&w)
                .map(|((a, b), w)| a * b * w)
                .sum();
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).abs());
        }
    }
    worst
}

/// Dimension of the degree-m eigenspace of the n-dimensional Hermite operator.
pub fn multiplicity(m: usize, n: usize) -> f64 {
    // C(m + n - 1, n - 1)
    let mut c = 1.0;
    for i in 1..n {
        c *= (m + i) as f64 / i as f64;
    }
    c
}
