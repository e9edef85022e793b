//! Multilinear interpolation.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::vector::VecN;

/// Corner flat indices and weights of the cell containing `p`. Fails when `p`
/// is outside the box or any corner is invalid.
fn cell_weights(grid: &GridSpec, mask: &[bool], p: &VecN) -> Option<([usize; 16], [f64; 16], usize)> {
    let (idx, frac) = grid.locate(p)?;
    let dim = grid.dim();
    let strides = grid.strides();
    let base: usize = (0..dim).map(|k| idx[k] * strides[k]).sum();
    let corners = 1usize << dim;
    let mut flats = [0usize; 16];
    let mut weights = [0.0f64; 16];
    for c in 0..corners {
        let mut flat = base;
        let mut w = 1.0;
        for k in 0..dim {
            if (c >> k) & 1 == 1 {
                flat += strides[k];
                w *= frac[k];
            } else {
                w *= 1.0 - frac[k];
            }
        }
        if !mask[flat] {
            return None;
        }
        flats[c] = flat;
        weights[c] = w;
    }
    Some((flats, weights, corners))
}

fn out_of_domain(p: &VecN) -> Error {
    Error::OutOfDomain { point: p.to_vec() }
}

/// Multilinear interpolation of each component at `p`.
pub fn interpolate(u: &VectorField, p: &VecN) -> Result<VecN> {
    let (flats, weights, corners) =
        cell_weights(&u.grid, &u.mask, p).ok_or_else(|| out_of_domain(p))?;
    Ok(VecN::from_fn(u.dim(), |k| {
        let comp = &u.components[k];
        (0..corners).map(|c| weights[c] * comp[flats[c]]).sum()
    }))
}

pub fn interpolate_scalar(f: &ScalarField, p: &VecN) -> Result<f64> {
    let (flats, weights, corners) =
        cell_weights(&f.grid, &f.mask, p).ok_or_else(|| out_of_domain(p))?;
    Ok((0..corners).map(|c| weights[c] * f.values[flats[c]]).sum())
}

/// Interpolate several node arrays sharing one grid and mask.
pub fn interpolate_arrays(
    grid: &GridSpec,
    mask: &[bool],
    arrays: &[&[f64]],
    p: &VecN,
) -> Result<Vec<f64>> {
    let (flats, weights, corners) = cell_weights(grid, mask, p).ok_or_else(|| out_of_domain(p))?;
    Ok(arrays
        .iter()
        .map(|a| (0..corners).map(|c| weights[c] * a[flats[c]]).sum())
        .collect())
}
