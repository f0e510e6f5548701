//! Sweep manifests: parsing, validation and hashing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LinearDecay,
    Lifespan,
    PhaseDiagram,
    Gn,
    BlowupFunctional,
}

/// Discretization knobs shared by the solver-backed experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Resolution {
    pub k_max: usize,
    pub lambda_max: f64,
    pub dt0: f64,
    /// T_guess = guess_scale · (C₀ε)^{e}; boxes are sized from it.
    pub guess_scale: f64,
    pub c0: f64,
    /// Lifespan points are repeated at dt/2 and must agree.
    pub certify_dt: bool,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            k_max: 32,
            lambda_max: 1.0,
            dt0: 0.5,
            guess_scale: 5.0,
            c0: 0.1,
            certify_dt: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub kind: ExperimentKind,
    /// Homogeneous dimension Q = 2n + 2.
    pub q: usize,
    #[serde(default)]
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
    /// Radii for the blow-up functional.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Per-point wall-time limit in seconds; points over it are marked failed.
    #[serde(default)]
    pub max_wall_seconds: Option<f64>,
}

/// ε grid used by lifespan sweeps unless a manifest overrides it.
pub const DEFAULT_EPS: [f64; 7] = [1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.12];

impl SweepManifest {
    pub fn new(kind: ExperimentKind, q: usize) -> Self {
        Self {
            kind,
            q,
            gamma: Vec::new(),
            p: Vec::new(),
            s: Vec::new(),
            eps: Vec::new(),
            radii: Vec::new(),
            resolution: Resolution::default(),
            seed: 0,
            out_dir: None,
            max_wall_seconds: None,
        }
    }

    /// Reads TOML or JSON, chosen by file extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| Error::Serde(e.to_string()))?,
            Some("json") => serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))?,
            _ => {
                return Err(Error::invalid(format!(
                    "manifest {} must end in .toml or .json",
                    path.display()
                )))
            }
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 4 || !self.q.is_multiple_of(2) {
            return Err(Error::invalid("Q must be an even integer >= 4"));
        }
        let need = |name: &str, v: &[f64]| {
            if v.is_empty() {
                Err(Error::invalid(format!("{:?} sweep needs a non-empty {name} grid", self.kind)))
            } else if v.iter().any(|x| !x.is_finite()) {
                Err(Error::invalid(format!("{name} grid has non-finite entries")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ExperimentKind::LinearDecay => {
                need("gamma", &self.gamma)?;
                need("s", &self.s)?;
            }
            ExperimentKind::Lifespan => {
                need("gamma", &self.gamma)?;
                need("p", &self.p)?;
                need("eps", &self.eps)?;
            }
            ExperimentKind::PhaseDiagram => {
                need("gamma", &self.gamma)?;
                need("p", &self.p)?;
                need("eps", &self.eps)?;
            }
            ExperimentKind::Gn => need("s", &self.s)?,
            ExperimentKind::BlowupFunctional => {
                need("gamma", &self.gamma)?;
                need("radii", &self.radii)?;
            }
        }
        if !self.eps.is_empty() {
            if self.eps.iter().any(|e| *e <= 0.0) {
                return Err(Error::invalid("eps values must be positive"));
            }
            if self.eps.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::invalid("eps list must be strictly decreasing"));
            }
        }
        if self.p.iter().any(|p| *p <= 1.0) {
            return Err(Error::invalid("p values must exceed 1"));
        }
        if let Some(w) = self.max_wall_seconds {
            if !(w > 0.0) {
                return Err(Error::invalid("max_wall_seconds must be positive"));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut m = self.clone();
        m.out_dir = None;
        let bytes = serde_json::to_vec(&m).expect("manifest serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}
