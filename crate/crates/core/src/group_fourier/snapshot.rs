//! "HWF1" binary snapshots of spectral and physical fields.
//!
//! Layout (all little-endian): magic `HWF1`; u32 header n, k_max,
//! λ node count J (both signs), r node count, τ half-axis node count;
//! then f64 arrays: positive λ nodes and weights (J/2 each), r nodes and
//! weights, τ half-axis nodes and weights, coefficients c[k][j] as
//! (re, im) pairs, and physical values v[i][l] on the full τ axis.
//! Sections whose count is zero are absent.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite_core::quadrature::Axis;
use crate::hermite_core::HermiteBasisSpec;

use super::field::SpectralField;
use super::grid::{LambdaGrid, PhysicalField, PhysicalGrid};

pub const MAGIC: &[u8; 4] = b"HWF1";

#[derive(Debug, Default)]
pub struct Snapshot {
    pub spectral: Option<SpectralField>,
    pub physical: Option<PhysicalField>,
}

fn put_u32(w: &mut impl Write, v: usize) -> std::io::Result<()> {
    let v = u32::try_from(v).map_err(|_| std::io::Error::other("header field overflows u32"))?;
    w.write_all(&v.to_le_bytes())
}

fn put_f64s(w: &mut impl Write, v: &[f64]) -> std::io::Result<()> {
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn get_u32(r: &mut impl Read) -> std::io::Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn get_f64s(r: &mut impl Read, n: usize) -> std::io::Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut b = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut b)?;
        out.push(f64::from_le_bytes(b));
    }
    Ok(out)
}

pub fn write(
    w: &mut impl Write,
    spectral: Option<&SpectralField>,
    physical: Option<&PhysicalField>,
) -> std::io::Result<()> {
    let n = spectral
        .map(|s| s.basis.n)
        .or(physical.map(|p| p.grid.n))
        .unwrap_or(1);
    w.write_all(MAGIC)?;
    put_u32(w, n)?;
    put_u32(w, spectral.map_or(0, |s| s.basis.k_max))?;
    put_u32(w, spectral.map_or(0, |s| s.grid.len()))?;
    put_u32(w, physical.map_or(0, |p| p.grid.nr()))?;
    put_u32(w, physical.map_or(0, |p| p.grid.tau_half.len()))?;
    if let Some(s) = spectral {
        put_f64s(w, s.grid.positive_nodes())?;
        put_f64s(w, s.grid.positive_weights())?;
    }
    if let Some(p) = physical {
        put_f64s(w, &p.grid.r.nodes)?;
        put_f64s(w, &p.grid.r.weights)?;
        put_f64s(w, &p.grid.tau_half.nodes)?;
        put_f64s(w, &p.grid.tau_half.weights)?;
    }
    if let Some(s) = spectral {
        for c in &s.coeffs {
            put_f64s(w, &[c.re, c.im])?;
        }
    }
    if let Some(p) = physical {
        put_f64s(w, &p.values)?;
    }
    Ok(())
}

pub fn read(r: &mut impl Read) -> Result<Snapshot> {
    let io = |e| Error::Serde(format!("snapshot: {e}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(Error::Serde("snapshot: bad magic".into()));
    }
    let n = get_u32(r).map_err(io)?;
    let k_max = get_u32(r).map_err(io)?;
    let nj = get_u32(r).map_err(io)?;
    let nr = get_u32(r).map_err(io)?;
    let nh = get_u32(r).map_err(io)?;
    let lgrid = if nj > 0 {
        let nodes = get_f64s(r, nj / 2).map_err(io)?;
        let weights = get_f64s(r, nj / 2).map_err(io)?;
        Some(Arc::new(LambdaGrid::from_positive(n, nodes, weights)?))
    } else {
        None
    };
    let pgrid = if nr > 0 {
        let rn = get_f64s(r, nr).map_err(io)?;
        let rw = get_f64s(r, nr).map_err(io)?;
        let tn = get_f64s(r, nh).map_err(io)?;
        let tw = get_f64s(r, nh).map_err(io)?;
        Some(Arc::new(PhysicalGrid::new(
            n,
            Axis {
                nodes: rn,
                weights: rw,
            },
            Axis {
                nodes: tn,
                weights: tw,
            },
            None,
        )?))
    } else {
        None
    };
    let mut snap = Snapshot::default();
    if let Some(g) = lgrid {
        let basis = HermiteBasisSpec::for_degree(n, k_max)?;
        let raw = get_f64s(r, 2 * (k_max + 1) * nj).map_err(io)?;
        let coeffs = raw
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        snap.spectral = Some(SpectralField {
            basis,
            grid: g,
            coeffs,
        });
    }
    if let Some(g) = pgrid {
        let values = get_f64s(r, g.nr() * g.ntau()).map_err(io)?;
        snap.physical = Some(PhysicalField { grid: g, values });
    }
    Ok(snap)
}
