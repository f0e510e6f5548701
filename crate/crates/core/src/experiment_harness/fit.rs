//! Least-squares power laws in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    /// log of the prefactor.
    pub intercept: f64,
}

/// Fits log T = intercept + exponent · log ε.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 4 {
        return Err(Error::invalid(format!("need >= 4 points, got {}", pairs.len())));
    }
    if pairs.iter().any(|(e, t)| !(*e > 0.0 && *t > 0.0)) {
        return Err(Error::invalid("power-law fit needs positive pairs"));
    }
    let lo = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi < 2.0 * lo {
        return Err(Error::invalid("ε spread below a factor of 2"));
    }
    let n = pairs.len() as f64;
    let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - exponent * a).powi(2))
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(PowerLawFit {
        exponent,
        stderr,
        intercept,
    })
}
