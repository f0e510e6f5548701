//! Sobolev norms and multipliers on spectral fields, and initial-data synthesis.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_fourier::{LambdaGrid, PhysicalField, PhysicalGrid, SpectralField};
use crate::hermite_core::{hermite_eigenvalue, HermiteBasisSpec};

fn weighted_sum(f: &SpectralField, mult: impl Fn(f64) -> f64) -> f64 {
    let w = f.grid.positive_weights();
    let lam = f.grid.positive_nodes();
    let mut s = 0.0;
    for k in 0..f.degrees() {
        let mu = hermite_eigenvalue(k, f.basis.n) as f64;
        let d = f.multiplicity(k);
        for (m, (wm, l)) in w.iter().zip(lam).enumerate() {
            let a = f.get(k, f.grid.j_pos(m)).norm_sqr() + f.get(k, f.grid.j_neg(m)).norm_sqr();
            if a != 0.0 {
                s += d * wm * mult(l * mu) * a;
            }
        }
    }
    s
}

/// ‖f‖_{Ḣ^s}: sqrt(Σ_j w_j Σ_k d_k (|λ_j| μ_k)^s |c[k][j]|²).
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    if s == 0.0 {
        weighted_sum(f, |_| 1.0).sqrt()
    } else {
        weighted_sum(f, |b| b.powf(s)).sqrt()
    }
}

/// ‖f‖_{H^s} with multiplier (1 + |λ|μ_k)^s.
pub fn inhomogeneous_sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    weighted_sum(f, |b| (1.0 + b).powf(s)).sqrt()
}

/// Multiplies c[k][j] by (|λ_j| μ_k)^sigma.
pub fn apply_sublaplacian_power(f: &SpectralField, sigma: f64) -> SpectralField {
    let mut out = f.clone();
    if sigma == 0.0 {
        return out;
    }
    let nodes = f.grid.nodes();
    let nj = nodes.len();
    for k in 0..f.degrees() {
        let mu = hermite_eigenvalue(k, f.basis.n) as f64;
        for (j, l) in nodes.iter().enumerate() {
            out.coeffs[k * nj + j] *= (l.abs() * mu).powf(sigma);
        }
    }
    out
}

fn step_kernel(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let e = (-1.0 / x).exp();
    let x2 = x * x;
    (e, e / x2, e * (1.0 - 2.0 * x) / (x2 * x2))
}

/// C^∞ step rising from 0 at x ≤ 0 to 1 at x ≥ 1, with its first two derivatives.
pub fn smooth_step(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (a, da, dda) = step_kernel(x);
    let (b, db, ddb) = step_kernel(1.0 - x);
    // S = a/(a+b) with b' = −db, b'' = ddb in x
    let d = a + b;
    let dd = da - db;
    let ddd = dda + ddb;
    let s = a / d;
    let s1 = (da * d - a * dd) / (d * d);
    let s2 = (dda * d - a * ddd) / (d * d) - 2.0 * s1 * dd / d;
    (s, s1, s2)
}

/// Low-frequency amplitude shapes for synthesized fields, as functions of |λ|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmplitudeProfile {
    Flat,
    Power { exponent: f64 },
    /// |λ|^exponent · exp(−(|λ|/cutoff)²)
    SmoothPower { exponent: f64, cutoff: f64 },
}

impl AmplitudeProfile {
    pub fn eval(&self, l: f64) -> f64 {
        match *self {
            AmplitudeProfile::Flat => 1.0,
            AmplitudeProfile::Power { exponent } => l.powf(exponent),
            AmplitudeProfile::SmoothPower { exponent, cutoff } => {
                l.powf(exponent) * (-(l / cutoff).powi(2)).exp()
            }
        }
    }
}

/// Field with c[k](λ) = profile(|λ|) for k in `k_set` and |λ| in `band`,
/// zero elsewhere; real amplitudes make it reality-symmetric and even in τ.
pub fn synthesize_band_field(
    basis: &HermiteBasisSpec,
    grid: Arc<LambdaGrid>,
    k_set: &[usize],
    band: (f64, f64),
    profile: &AmplitudeProfile,
) -> Result<SpectralField> {
    if !(band.0 >= 0.0 && band.1 > band.0) {
        return Err(Error::invalid("band must satisfy 0 <= lo < hi"));
    }
    if let Some(k) = k_set.iter().find(|k| **k > basis.k_max) {
        return Err(Error::invalid(format!("degree {k} beyond k_max")));
    }
    let mut f = SpectralField::zeros(basis.clone(), grid.clone());
    for &k in k_set {
        for (m, &l) in grid.positive_nodes().iter().enumerate() {
            if l >= band.0 && l <= band.1 {
                f.set_pair(k, m, Complex64::new(profile.eval(l), 0.0));
            }
        }
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    #[default]
    Koranyi,
}

/// C₀ ⟨g⟩^{-(Q/2+γ)} (log(e+|g|))^{-1} data profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataProfileSpec {
    pub c0: f64,
    pub q: usize,
    pub gamma: f64,
    #[serde(default)]
    pub gauge: Gauge,
}

impl DataProfileSpec {
    pub fn new(c0: f64, q: usize, gamma: f64) -> Result<Self> {
        let s = Self {
            c0,
            q,
            gamma,
            gauge: Gauge::Koranyi,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0) {
            return Err(Error::invalid("C0 must be positive"));
        }
        if self.q < 4 || !self.q.is_multiple_of(2) {
            return Err(Error::invalid("Q must be an even integer >= 4"));
        }
        if !(self.gamma > 0.0 && self.gamma < self.q as f64 / 2.0) {
            return Err(Error::invalid(format!(
                "gamma = {} outside (0, Q/2)",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn gauge(&self, r: f64, tau: f64) -> f64 {
        match self.gauge {
            Gauge::Koranyi => (r.powi(4) + tau * tau).powf(0.25),
        }
    }

    /// Profile as a function of the gauge value |g|.
    pub fn value_at_gauge(&self, g: f64) -> f64 {
        let q = self.q as f64;
        self.c0 * (1.0 + g * g).powf(-(q / 4.0 + self.gamma / 2.0))
            / (std::f64::consts::E + g).ln()
    }

    pub fn value(&self, r: f64, tau: f64) -> f64 {
        self.value_at_gauge(self.gauge(r, tau))
    }
}

pub fn sample_blowup_profile(spec: &DataProfileSpec, grid: Arc<PhysicalGrid>) -> Result<PhysicalField> {
    spec.validate()?;
    if spec.q != 2 * grid.n + 2 {
        return Err(Error::invalid("profile Q does not match the grid's n"));
    }
    PhysicalField::from_fn(grid, |r, t| spec.value(r, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_fourier::LambdaGridSpec;
    use std::f64::consts::PI;

    fn reference() -> SpectralField {
        let basis = HermiteBasisSpec::for_degree(1, 4).unwrap();
        let grid = Arc::new(
            LambdaGridSpec::Log {
                lambda_min: 0.5,
                lambda_max: 3.0,
                per_sign: 4001,
            }
            .build(1)
            .unwrap(),
        );
        synthesize_band_field(&basis, grid, &[0], (1.0, 2.0), &AmplitudeProfile::Flat).unwrap()
    }

    #[test]
    fn closed_form_band_norms() {
        // the band edges fall between nodes, so the rule is first order there
        let f = reference();
        let l2 = sobolev_norm(&f, 0.0).powi(2);
        assert!((l2 / (3.0 / (4.0 * PI * PI)) - 1.0).abs() < 2e-3, "{l2}");
        let h1 = sobolev_norm(&f, 1.0).powi(2);
        assert!((h1 / (7.0 / (6.0 * PI * PI)) - 1.0).abs() < 2e-3);
        let hm1 = sobolev_norm(&f, -1.0).powi(2);
        assert!((hm1 / (1.0 / (2.0 * PI * PI)) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn empty_k_set_is_zero() {
        let f = reference();
        let z = synthesize_band_field(&f.basis, f.grid.clone(), &[], (1.0, 2.0), &AmplitudeProfile::Flat)
            .unwrap();
        assert_eq!(sobolev_norm(&z, 0.0), 0.0);
    }

    #[test]
    fn profile_values() {
        let p = DataProfileSpec::new(1.0, 4, 1.0).unwrap();
        assert!((p.value(0.0, 0.0) - 1.0).abs() < 1e-15);
        let v = p.value_at_gauge(10.0);
        let direct = 101f64.powf(-1.5) / (std::f64::consts::E + 10.0).ln();
        assert!((v - direct).abs() < 1e-18);
        assert!((v - 3.88e-4).abs() < 5e-6);
        assert!(DataProfileSpec::new(1.0, 4, 2.0).is_err());
    }
}
