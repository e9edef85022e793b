//! Finite-difference operators on node-sampled fields.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField, MIN_NODES_PER_AXIS};
use crate::par;

fn check_stencil(grid: &GridSpec) -> Result<()> {
    for (axis, &n) in grid.shape().iter().enumerate() {
        if n < MIN_NODES_PER_AXIS {
            return Err(Error::StencilUnavailable {
                axis,
                nodes: n,
                needed: MIN_NODES_PER_AXIS,
            });
        }
    }
    Ok(())
}

/// Central difference along `axis` at `flat`, if both neighbours are valid.
#[inline]
pub fn central(
    grid: &GridSpec,
    values: &[f64],
    mask: &[bool],
    flat: usize,
    axis: usize,
) -> Option<f64> {
    let lo = grid.neighbor(flat, axis, -1)?;
    let hi = grid.neighbor(flat, axis, 1)?;
    if mask[lo] && mask[hi] {
        Some((values[hi] - values[lo]) / (2.0 * grid.spacing()[axis]))
    } else {
        None
    }
}

/// Central difference where possible, else a second-order one-sided stencil.
/// The flag is true when the central stencil was used.
fn derivative(
    grid: &GridSpec,
    values: &[f64],
    mask: &[bool],
    flat: usize,
    axis: usize,
) -> Option<(f64, bool)> {
    if let Some(d) = central(grid, values, mask, flat, axis) {
        return Some((d, true));
    }
    let h = grid.spacing()[axis];
    let one_sided = |dir: isize| -> Option<f64> {
        let a = grid.neighbor(flat, axis, dir)?;
        let b = grid.neighbor(flat, axis, 2 * dir)?;
        if !(mask[a] && mask[b]) {
            return None;
        }
        let d = (-3.0 * values[flat] + 4.0 * values[a] - values[b]) / (2.0 * h);
        Some(d * dir as f64)
    };
    one_sided(1).or_else(|| one_sided(-1)).map(|d| (d, false))
}

/// Gradient of a scalar field. Interior nodes use central differences and
/// boundary nodes one-sided second-order stencils; the output mask marks the
/// nodes where the central stencil was available along every axis.
pub fn gradient(psi: &ScalarField) -> Result<VectorField> {
    let grid = &psi.grid;
    check_stencil(grid)?;
    let dim = grid.dim();
    let rows = par::map_range(grid.len(), |i| {
        let mut out = [0.0; 4];
        if !psi.mask[i] {
            return (out, false);
        }
        let mut full = true;
        for k in 0..dim {
            match derivative(grid, &psi.values, &psi.mask, i, k) {
                Some((d, c)) => {
                    out[k] = d;
                    full &= c;
                }
                None => full = false,
            }
        }
        (out, full)
    });
    let mut components = vec![vec![0.0; grid.len()]; dim];
    let mut mask = vec![false; grid.len()];
    for (i, (row, ok)) in rows.into_iter().enumerate() {
        for k in 0..dim {
            components[k][i] = row[k];
        }
        mask[i] = ok;
    }
    VectorField::new(grid.clone(), components, mask)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurlPair {
    pub i: usize,
    pub j: usize,
    /// `d_i u_j - d_j u_i` per node (zero where not computable).
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurlReport {
    pub max_abs: f64,
    pub pairs: Vec<CurlPair>,
    /// Nodes where every pair was computable.
    pub mask: Vec<bool>,
}

/// Curl components `d_i u_j - d_j u_i` restricted to the given index pairs,
/// central differences only.
pub fn curl_pairs(u: &VectorField, pairs: &[(usize, usize)]) -> Result<CurlReport> {
    let grid = &u.grid;
    check_stencil(grid)?;
    let n = grid.len();
    let rows = par::map_range(n, |x| {
        if !u.mask[x] {
            return None;
        }
        pairs
            .iter()
            .map(|&(i, j)| {
                let dij = central(grid, &u.components[j], &u.mask, x, i)?;
                let dji = central(grid, &u.components[i], &u.mask, x, j)?;
                Some(dij - dji)
            })
            .collect::<Option<Vec<f64>>>()
    });
    let mut out: Vec<CurlPair> = pairs
        .iter()
        .map(|&(i, j)| CurlPair {
            i,
            j,
            values: vec![0.0; n],
        })
        .collect();
    let mut mask = vec![false; n];
    let mut max_abs = 0.0f64;
    for (x, row) in rows.into_iter().enumerate() {
        if let Some(vals) = row {
            mask[x] = true;
            for (p, v) in vals.into_iter().enumerate() {
                out[p].values[x] = v;
                max_abs = max_abs.max(v.abs());
            }
        }
    }
    Ok(CurlReport {
        max_abs,
        pairs: out,
        mask,
    })
}

/// Max over masked interior nodes and all pairs `i < j` of `|d_i u_j - d_j u_i|`.
pub fn curl_residual(u: &VectorField) -> Result<CurlReport> {
    let dim = u.dim();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
        .collect();
    curl_pairs(u, &pairs)
}

/// Central-difference divergence on masked interior nodes.
pub fn divergence(u: &VectorField) -> Result<ScalarField> {
    let grid = &u.grid;
    check_stencil(grid)?;
    let dim = u.dim();
    let rows = par::map_range(grid.len(), |x| {
        if !u.mask[x] {
            return None;
        }
        let mut s = 0.0;
        for k in 0..dim {
            s += central(grid, &u.components[k], &u.mask, x, k)?;
        }
        Some(s)
    });
    let mask: Vec<bool> = rows.iter().map(|r| r.is_some()).collect();
    let values = rows.into_iter().map(|r| r.unwrap_or(0.0)).collect();
    ScalarField::with_mask(grid.clone(), values, mask)
}
