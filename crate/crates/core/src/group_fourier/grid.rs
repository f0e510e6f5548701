//! Frequency grids in λ and physical (r, τ) grids for z-radial fields.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite_core::quadrature::{Axis, AxisSpec};

/// Plancherel constant c_n = (2π)^{-(n+1)}.
pub fn plancherel_constant(n: usize) -> f64 {
    (2.0 * PI).powi(-(n as i32 + 1))
}

/// Surface area of the unit sphere in R^{2n}.
pub fn sphere_area(n: usize) -> f64 {
    let mut fact = 1.0;
    for i in 1..n {
        fact *= i as f64;
    }
    2.0 * PI.powi(n as i32) / fact
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaGridSpec {
    /// `per_sign` log-spaced nodes on [lambda_min, lambda_max].
    Log {
        lambda_min: f64,
        lambda_max: f64,
        per_sign: usize,
    },
    /// Smooth blend of log spacing (ratio `log_step`) below the crossover and
    /// uniform spacing `spacing` above it: λ(ξ) = A ln(1 + e^ξ), A = spacing / log_step.
    LogLinear {
        lambda_min: f64,
        lambda_max: f64,
        spacing: f64,
        log_step: f64,
    },
}

impl Default for LambdaGridSpec {
    fn default() -> Self {
        LambdaGridSpec::Log {
            lambda_min: 1e-3,
            lambda_max: 1e2,
            per_sign: 96,
        }
    }
}

impl LambdaGridSpec {
    /// Twice the node density.
    pub fn refined(&self) -> Self {
        match *self {
            LambdaGridSpec::Log {
                lambda_min,
                lambda_max,
                per_sign,
            } => LambdaGridSpec::Log {
                lambda_min,
                lambda_max,
                per_sign: 2 * per_sign,
            },
            LambdaGridSpec::LogLinear {
                lambda_min,
                lambda_max,
                spacing,
                log_step,
            } => LambdaGridSpec::LogLinear {
                lambda_min,
                lambda_max,
                spacing: 0.5 * spacing,
                log_step: 0.5 * log_step,
            },
        }
    }

    pub fn with_lambda_min(&self, lm: f64) -> Self {
        let mut s = *self;
        match &mut s {
            LambdaGridSpec::Log { lambda_min, .. } | LambdaGridSpec::LogLinear { lambda_min, .. } => {
                *lambda_min = lm
            }
        }
        s
    }

    pub fn build(&self, n: usize) -> Result<LambdaGrid> {
        LambdaGrid::new(n, *self)
    }
}

/// Symmetric λ nodes with Plancherel-weighted quadrature weights.
///
/// Only the positive half is stored; node `m` of the half maps to full
/// index `M + m` and its mirror −λ to `M − 1 − m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub n: usize,
    pub spec: Option<LambdaGridSpec>,
    pos: Vec<f64>,
    pos_weights: Vec<f64>,
}

impl LambdaGrid {
    pub fn new(n: usize, spec: LambdaGridSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        let cn = plancherel_constant(n);
        let (pos, jac): (Vec<f64>, Vec<f64>) = match spec {
            LambdaGridSpec::Log {
                lambda_min,
                lambda_max,
                per_sign,
            } => {
                check_range(lambda_min, lambda_max)?;
                if per_sign < 2 {
                    return Err(Error::invalid("need at least 2 nodes per sign"));
                }
                let h = (lambda_max / lambda_min).ln() / (per_sign - 1) as f64;
                let nodes: Vec<f64> = (0..per_sign)
                    .map(|m| lambda_min * (m as f64 * h).exp())
                    .collect();
                let jac = nodes
                    .iter()
                    .enumerate()
                    .map(|(m, l)| {
                        let end = if m == 0 || m == per_sign - 1 { 0.5 } else { 1.0 };
                        end * h * l
                    })
                    .collect();
                (nodes, jac)
            }
            LambdaGridSpec::LogLinear {
                lambda_min,
                lambda_max,
                spacing,
                log_step,
            } => {
                check_range(lambda_min, lambda_max)?;
                if !(spacing > 0.0 && log_step > 0.0) {
                    return Err(Error::invalid("spacing and log_step must be positive"));
                }
                let a = spacing / log_step;
                // ξ = ln(e^{λ/A} − 1)
                let xi_of = |l: f64| (l / a).exp_m1().ln();
                let xi0 = xi_of(lambda_min);
                let xi1 = xi_of(lambda_max);
                let count = ((xi1 - xi0) / log_step).ceil() as usize + 1;
                let h = (xi1 - xi0) / (count - 1) as f64;
                let mut nodes = Vec::with_capacity(count);
                let mut jac = Vec::with_capacity(count);
                for m in 0..count {
                    let xi = xi0 + m as f64 * h;
                    // A ln(1 + e^ξ), and its derivative A σ(ξ)
                    let l = if xi > 30.0 {
                        a * (xi + (-xi).exp().ln_1p())
                    } else {
                        a * xi.exp().ln_1p()
                    };
                    let d = a / (1.0 + (-xi).exp());
                    let end = if m == 0 || m == count - 1 { 0.5 } else { 1.0 };
                    nodes.push(l);
                    jac.push(end * h * d);
                }
                (nodes, jac)
            }
        };
        let pos_weights = pos
            .iter()
            .zip(&jac)
            .map(|(l, j)| j * cn * l.powi(n as i32))
            .collect();
        Ok(Self {
            n,
            spec: Some(spec),
            pos,
            pos_weights,
        })
    }

    /// A grid from explicit positive nodes and Plancherel-weighted weights.
    pub fn from_positive(n: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.len() < 2 {
            return Err(Error::invalid("need matching node and weight arrays"));
        }
        if nodes[0] <= 0.0 {
            return Err(Error::invalid("positive nodes must be > 0"));
        }
        strictly_increasing(&nodes, "lambda")?;
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::invalid("weights must be positive"));
        }
        Ok(Self {
            n,
            spec: None,
            pos: nodes,
            pos_weights: weights,
        })
    }

    /// Number of positive nodes.
    pub fn half_len(&self) -> usize {
        self.pos.len()
    }

    pub fn len(&self) -> usize {
        2 * self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn positive_nodes(&self) -> &[f64] {
        &self.pos
    }

    pub fn positive_weights(&self) -> &[f64] {
        &self.pos_weights
    }

    pub fn j_pos(&self, m: usize) -> usize {
        self.pos.len() + m
    }

    pub fn j_neg(&self, m: usize) -> usize {
        self.pos.len() - 1 - m
    }

    /// All nodes in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pos.iter().rev().map(|l| -l).collect();
        v.extend_from_slice(&self.pos);
        v
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pos_weights.iter().rev().copied().collect();
        v.extend_from_slice(&self.pos_weights);
        v
    }

    pub fn lambda_min(&self) -> f64 {
        self.pos[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.pos.last().unwrap()
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid(format!(
            "need 0 < lambda_min < lambda_max, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalGridSpec {
    pub n: usize,
    pub r: AxisSpec,
    /// Half of the symmetric τ axis, [0, τ_max].
    pub tau: AxisSpec,
}

impl PhysicalGridSpec {
    pub fn build(&self) -> Result<PhysicalGrid> {
        PhysicalGrid::new(self.n, self.r.build()?, self.tau.build()?, Some(*self))
    }

    pub fn refined(&self) -> Self {
        Self {
            n: self.n,
            r: self.r.refined(),
            tau: self.tau.refined(),
        }
    }
}

/// Tensor grid in (r, τ); τ nodes symmetric about 0 and include 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalGrid {
    pub n: usize,
    pub r: Axis,
    pub tau_half: Axis,
    pub spec: Option<PhysicalGridSpec>,
    tau_nodes: Vec<f64>,
    tau_weights: Vec<f64>,
    r_measure: Vec<f64>,
}

impl PhysicalGrid {
    pub fn new(n: usize, r: Axis, tau_half: Axis, spec: Option<PhysicalGridSpec>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        strictly_increasing(&r.nodes, "r")?;
        strictly_increasing(&tau_half.nodes, "tau")?;
        if r.nodes[0] < 0.0 || tau_half.nodes[0] != 0.0 {
            return Err(Error::invalid("r must be >= 0 and the tau half-axis must start at 0"));
        }
        let nh = tau_half.len();
        let mut tau_nodes = Vec::with_capacity(2 * nh - 1);
        let mut tau_weights = Vec::with_capacity(2 * nh - 1);
        for l in (1..nh).rev() {
            tau_nodes.push(-tau_half.nodes[l]);
            tau_weights.push(tau_half.weights[l]);
        }
        tau_nodes.push(0.0);
        tau_weights.push(2.0 * tau_half.weights[0]);
        for l in 1..nh {
            tau_nodes.push(tau_half.nodes[l]);
            tau_weights.push(tau_half.weights[l]);
        }
        let omega = sphere_area(n);
        let r_measure = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| omega * w * x.powi(2 * n as i32 - 1))
            .collect();
        Ok(Self {
            n,
            r,
            tau_half,
            spec,
            tau_nodes,
            tau_weights,
            r_measure,
        })
    }

    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn ntau(&self) -> usize {
        self.tau_nodes.len()
    }

    pub fn tau_nodes(&self) -> &[f64] {
        &self.tau_nodes
    }

    pub fn tau_weights(&self) -> &[f64] {
        &self.tau_weights
    }

    /// Polar measure ω_{2n} r^{2n-1} w_r at each r node.
    pub fn r_measure(&self) -> &[f64] {
        &self.r_measure
    }

    /// Index into the full τ axis of the half-axis node l at sign ±.
    pub fn tau_index(&self, l: usize, negative: bool) -> usize {
        let c = self.tau_half.len() - 1;
        if negative {
            c - l
        } else {
            c + l
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        let nt = self.ntau();
        let mut s = 0.0;
        for (i, rm) in self.r_measure.iter().enumerate() {
            let row = &values[i * nt..(i + 1) * nt];
            let inner: f64 = row.iter().zip(&self.tau_weights).map(|(v, w)| v * w).sum();
            s += rm * inner;
        }
        s
    }
}

fn strictly_increasing(v: &[f64], what: &str) -> Result<()> {
    if v.len() < 2 || v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(format!("{what} nodes must be strictly increasing")));
    }
    Ok(())
}

/// Samples v[i][l] of a z-radial real function on a physical grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    pub grid: Arc<PhysicalGrid>,
    pub values: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: Arc<PhysicalGrid>) -> Self {
        let len = grid.nr() * grid.ntau();
        Self {
            grid,
            values: vec![0.0; len],
        }
    }

    pub fn from_fn(grid: Arc<PhysicalGrid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let nt = grid.ntau();
        let mut values = Vec::with_capacity(grid.nr() * nt);
        for &r in &grid.r.nodes {
            for &t in grid.tau_nodes() {
                values.push(f(r, t));
            }
        }
        let out = Self { grid, values };
        out.check_finite()?;
        Ok(out)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("field has non-finite samples"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.grid.r.nodes
    }

    pub fn tau_nodes(&self) -> &[f64] {
        self.grid.tau_nodes()
    }

    pub fn at(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.grid.ntau() + l]
    }

    /// ∫ |f|^q dg on the polar grid.
    pub fn lq_integral(&self, q: f64) -> f64 {
        let pw: Vec<f64> = self.values.iter().map(|v| v.abs().powf(q)).collect();
        self.grid.integrate(&pw)
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        self.lq_integral(q).powf(1.0 / q)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lq_norm(2.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}
