//! The test functions φ_R(t, g) = β(t/R²) α(|x|/R) α(|y|/R) β(τ/R²).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_fourier::GroupPoint;
use crate::spectral_field::smooth_step;

/// Even plateau bump: 1 on |x| ≤ plateau, 0 on |x| ≥ support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub plateau: f64,
    pub support: f64,
}

impl Bump {
    /// (value, d/dx, d²/dx²) at x ≥ 0.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let w = self.support - self.plateau;
        let (s, s1, s2) = smooth_step((x - self.plateau) / w);
        (1.0 - s, -s1 / w, -s2 / (w * w))
    }

    /// Even extension: derivatives with respect to the signed argument.
    pub fn eval_signed(&self, x: f64) -> (f64, f64, f64) {
        let (v, d, dd) = self.eval(x.abs());
        (v, d * x.signum(), dd)
    }

    /// sup |b'| / b^{1/p} over the transition layer, sampled on `samples` points.
    pub fn power_constant(&self, p: f64, samples: usize) -> f64 {
        let mut c = 0.0f64;
        for i in 1..samples {
            let x = self.plateau + (self.support - self.plateau) * i as f64 / samples as f64;
            let (v, d, _) = self.eval(x);
            if v > 0.0 {
                c = c.max(d.abs() / v.powf(1.0 / p));
            }
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    /// Spatial profile α, plateau 1/2 and support 1 by default.
    pub alpha: Bump,
    /// Temporal and central profile β, plateau 1/4 and support 1 by default.
    pub beta: Bump,
    pub r: f64,
}

impl BumpSpec {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::Precondition(format!("R = {r} must exceed 1")));
        }
        Ok(Self {
            alpha: Bump {
                plateau: 0.5,
                support: 1.0,
            },
            beta: Bump {
                plateau: 0.25,
                support: 1.0,
            },
            r,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionValue {
    pub phi: f64,
    pub dt_phi: f64,
    pub dtt_phi: f64,
    pub l_phi: f64,
}

/// a(|v|/R) with its derivative in ρ = |v| and its Euclidean Laplacian in v ∈ ℝⁿ.
fn radial(b: &Bump, v: &[f64], r: f64) -> (f64, f64, f64) {
    let rho = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, a1, a2) = b.eval(rho / r);
    let d = a1 / r;
    let dd = a2 / (r * r);
    let n = v.len() as f64;
    // (n − 1) a'/ρ vanishes on the plateau, which contains ρ = 0
    let lap = if rho > 0.0 && d != 0.0 { dd + (n - 1.0) * d / rho } else { dd };
    (a, d, lap)
}

/// φ_R and its derivatives from the closed-form expansion
/// Lφ = ΔA·B + (Σ_j x_j∂_{y_j}A − y_j∂_{x_j}A)·B' + (|x|²+|y|²)/4·A·B''.
pub fn test_function_eval(spec: &BumpSpec, t: f64, g: &GroupPoint) -> TestFunctionValue {
    let r = spec.r;
    let r2 = r * r;
    let (bt, bt1, bt2) = spec.beta.eval_signed(t / r2);
    let (bc, bc1, bc2) = spec.beta.eval_signed(g.tau / r2);
    let (ax, dax, lax) = radial(&spec.alpha, &g.x, r);
    let (ay, day, lay) = radial(&spec.alpha, &g.y, r);
    let rx = g.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ry = g.y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let xy: f64 = g.x.iter().zip(&g.y).map(|(a, b)| a * b).sum();

    let a = ax * ay;
    let lap_a = lax * ay + ax * lay;
    // Σ_j x_j ∂_{y_j} A = ax·day·(x·y)/|y|, Σ_j y_j ∂_{x_j} A = dax·ay·(x·y)/|x|
    let mixed = {
        let p1 = if ry > 0.0 { ax * day * xy / ry } else { 0.0 };
        let p2 = if rx > 0.0 { dax * ay * xy / rx } else { 0.0 };
        p1 - p2
    };
    let b = bc;
    let db = bc1 / r2;
    let ddb = bc2 / (r2 * r2);
    let l_space = lap_a * b + mixed * db + 0.25 * (rx * rx + ry * ry) * a * ddb;
    TestFunctionValue {
        phi: bt * a * b,
        dt_phi: bt1 / r2 * a * b,
        dtt_phi: bt2 / (r2 * r2) * a * b,
        l_phi: bt * l_space,
    }
}

/// Σ_j (X_j² + Y_j²) f at g by second differences along the left-invariant
/// flows g∘(±h e_j), Richardson-extrapolated in h.
pub fn sublaplacian_fd(f: impl Fn(&GroupPoint) -> f64, g: &GroupPoint, h: f64) -> f64 {
    let n = g.n();
    let second = |h: f64| {
        let f0 = f(g);
        let mut acc = 0.0;
        for j in 0..n {
            for along_y in [false, true] {
                let mut e = GroupPoint::identity(n);
                if along_y {
                    e.y[j] = h;
                } else {
                    e.x[j] = h;
                }
                let plus = g.compose(&e);
                e.x[j] = -e.x[j];
                e.y[j] = -e.y[j];
                let minus = g.compose(&e);
                acc += (f(&plus) - 2.0 * f0 + f(&minus)) / (h * h);
            }
        }
        acc
    };
    (4.0 * second(0.5 * h) - second(h)) / 3.0
}
