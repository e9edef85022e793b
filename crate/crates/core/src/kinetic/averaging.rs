//! Reconstruction `u(x) = (1 / V_{N-1}) sum_xi w xi chi(x, xi)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::par;
use crate::sphere::{ball_volume, DirectionSet};

#[derive(Debug, Clone)]
pub struct Averaging {
    pub field: VectorField,
    pub max_error: f64,
    pub normalization: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragingSummary {
    pub max_error: f64,
    pub normalization: f64,
    pub direction_count: usize,
}

impl Averaging {
    pub fn summary(&self, ds: &DirectionSet) -> AveragingSummary {
        AveragingSummary {
            max_error: self.max_error,
            normalization: self.normalization,
            direction_count: ds.len(),
        }
    }
}

fn reconstruct<const D: usize>(u: &VectorField, ds: &DirectionSet, scale: f64) -> Vec<[f64; D]> {
    let xs: Vec<[f64; D]> = ds
        .nodes
        .iter()
        .map(|x| std::array::from_fn(|k| x[k]))
        .collect();
    let wx: Vec<[f64; D]> = ds
        .nodes
        .iter()
        .zip(&ds.weights)
        .map(|(x, w)| std::array::from_fn(|k| w * x[k] * scale))
        .collect();
    par::map_range(u.grid.len(), |i| {
        let mut acc = [0.0; D];
        if !u.mask[i] {
            return acc;
        }
        let ui: [f64; D] = std::array::from_fn(|k| u.components[k][i]);
        for (x, wx) in xs.iter().zip(&wx) {
            let mut d = 0.0;
            for k in 0..D {
                d += ui[k] * x[k];
            }
            let on = if d > 0.0 { 1.0 } else { 0.0 };
            for k in 0..D {
                acc[k] += on * wx[k];
            }
        }
        acc
    })
}

fn assemble<const D: usize>(u: &VectorField, rows: Vec<[f64; D]>) -> Result<(VectorField, f64)> {
    let n = u.grid.len();
    let mut components = vec![vec![0.0; n]; D];
    let mut err = 0.0f64;
    for (i, r) in rows.into_iter().enumerate() {
        let mut e2 = 0.0;
        for k in 0..D {
            components[k][i] = r[k];
            e2 += (r[k] - u.components[k][i]).powi(2);
        }
        if u.mask[i] {
            err = err.max(e2.sqrt());
        }
    }
    Ok((VectorField::new(u.grid.clone(), components, u.mask.clone())?, err))
}

/// Reconstruct `u` from its kinetic indicator by the averaging formula and
/// report `max |u_hat - u|` over masked nodes.
pub fn averaging_reconstruct(u: &VectorField, ds: &DirectionSet) -> Result<Averaging> {
    let dim = u.dim();
    if ds.dim != dim {
        return Err(Error::Config(format!(
            "direction set has dimension {}, field has {dim}",
            ds.dim
        )));
    }
    let normalization = 1.0 / ball_volume(dim - 1);
    let (field, max_error) = match dim {
        2 => assemble::<2>(u, reconstruct::<2>(u, ds, normalization))?,
        3 => assemble::<3>(u, reconstruct::<3>(u, ds, normalization))?,
        4 => assemble::<4>(u, reconstruct::<4>(u, ds, normalization))?,
        _ => return Err(Error::Unsupported(format!("dimension {dim}"))),
    };
    Ok(Averaging {
        field,
        max_error,
        normalization,
    })
}
