//! Node/weight rules on intervals and stretched half-lines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
    }
    w
}

/// Composite Simpson weights; `n` must be odd and at least 3.
pub fn simpson_weights(n: usize, h: f64) -> Result<Vec<f64>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "Simpson rule needs an odd node count >= 3, got {n}"
        )));
    }
    let mut w: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 })
        .collect();
    w[0] = 1.0;
    w[n - 1] = 1.0;
    Ok(w.into_iter().map(|c| c * h / 3.0).collect())
}

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            dp = 1.0;
            z = 0.0;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let c = 0.5 * (b - a);
    let d = 0.5 * (b + a);
    (
        x.iter().map(|t| c * t + d).collect(),
        w.iter().map(|v| c * v).collect(),
    )
}

/// How nodes are laid out on a half-line [0, max].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxisLayout {
    Uniform,
    /// x = core * sinh(xi) with xi uniform; spacing ~core near 0, ~x far out.
    Stretched { core: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub layout: AxisLayout,
    pub max: f64,
    /// Node count on [0, max], including 0; odd.
    pub points: usize,
}

impl AxisSpec {
    pub fn uniform(max: f64, points: usize) -> Self {
        Self {
            layout: AxisLayout::Uniform,
            max,
            points,
        }
    }

    pub fn stretched(max: f64, points: usize, core: f64) -> Self {
        Self {
            layout: AxisLayout::Stretched { core },
            max,
            points,
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    pub fn build(&self) -> Result<Axis> {
        if !(self.max.is_finite() && self.max > 0.0) {
            return Err(Error::invalid("axis extent must be positive"));
        }
        match self.layout {
            AxisLayout::Uniform => {
                let h = self.max / (self.points.max(2) - 1) as f64;
                let weights = simpson_weights(self.points, h)?;
                let nodes = (0..self.points).map(|i| i as f64 * h).collect();
                Ok(Axis { nodes, weights })
            }
            AxisLayout::Stretched { core } => {
                if !(core > 0.0) {
                    return Err(Error::invalid("stretch core must be positive"));
                }
                let xi_max = (self.max / core).asinh();
                let h = xi_max / (self.points.max(2) - 1) as f64;
                let sw = simpson_weights(self.points, h)?;
                let mut nodes = Vec::with_capacity(self.points);
                let mut weights = Vec::with_capacity(self.points);
                for (i, w) in sw.into_iter().enumerate() {
                    let xi = i as f64 * h;
                    nodes.push(core * xi.sinh());
                    weights.push(w * core * xi.cosh());
                }
                Ok(Axis { nodes, weights })
            }
        }
    }
}

/// Nodes and weights of a 1-D rule; nodes strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}
