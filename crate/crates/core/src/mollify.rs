//! Discrete convolution with the normalized bump kernel.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::par;
use crate::testfn::TestFunction;
use crate::vector::{VecN, MAX_DIM};

/// Node offsets within radius `eps` and their kernel weights (summing to 1).
struct Kernel {
    offsets: Vec<[isize; MAX_DIM]>,
    weights: Vec<f64>,
}

impl Kernel {
    fn new(grid: &GridSpec, eps: f64) -> Result<Self> {
        let min = 2.0 * grid.max_spacing();
        if !(eps >= min) {
            return Err(Error::KernelUnderresolved { eps, min });
        }
        let dim = grid.dim();
        let bump = TestFunction::new(VecN::zeros(dim), eps)?;
        let reach: Vec<isize> = grid
            .spacing()
            .iter()
            .map(|h| (eps / h).ceil() as isize)
            .collect();
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let mut off = [0isize; MAX_DIM];
        for (k, r) in reach.iter().enumerate() {
            off[k] = -r;
        }
        loop {
            let x = VecN::from_fn(dim, |k| off[k] as f64 * grid.spacing()[k]);
            let w = bump.value(&x);
            if w > 0.0 {
                offsets.push(off);
                weights.push(w);
            }
            let mut k = dim;
            loop {
                if k == 0 {
                    let total: f64 = weights.iter().sum();
                    weights.iter_mut().for_each(|w| *w /= total);
                    return Ok(Self { offsets, weights });
                }
                k -= 1;
                if off[k] < reach[k] {
                    off[k] += 1;
                    break;
                }
                off[k] = -reach[k];
            }
        }
    }

    /// Flat indices of the kernel footprint around `flat`, or `None` when it
    /// leaves the grid or touches an invalid node.
    fn footprint(&self, grid: &GridSpec, mask: &[bool], flat: usize) -> Option<Vec<usize>> {
        let dim = grid.dim();
        let idx = grid.unravel(flat);
        let strides = grid.strides();
        let mut out = Vec::with_capacity(self.offsets.len());
        for off in &self.offsets {
            let mut f = 0isize;
            for k in 0..dim {
                let j = idx[k] as isize + off[k];
                if j < 0 || j >= grid.shape()[k] as isize {
                    return None;
                }
                f += j * strides[k] as isize;
            }
            let f = f as usize;
            if !mask[f] {
                return None;
            }
            out.push(f);
        }
        Some(out)
    }
}

fn convolve(grid: &GridSpec, mask: &[bool], arrays: &[&[f64]], eps: f64) -> Result<(Vec<Vec<f64>>, Vec<bool>)> {
    let kernel = Kernel::new(grid, eps)?;
    let rows = par::map_range(grid.len(), |i| {
        if !mask[i] {
            return None;
        }
        let fp = kernel.footprint(grid, mask, i)?;
        Some(
            arrays
                .iter()
                .map(|a| fp.iter().zip(&kernel.weights).map(|(&f, w)| w * a[f]).sum::<f64>())
                .collect::<Vec<f64>>(),
        )
    });
    let mut out = vec![vec![0.0; grid.len()]; arrays.len()];
    let mut out_mask = vec![false; grid.len()];
    for (i, row) in rows.into_iter().enumerate() {
        if let Some(vals) = row {
            out_mask[i] = true;
            for (c, v) in vals.into_iter().enumerate() {
                out[c][i] = v;
            }
        }
    }
    Ok((out, out_mask))
}

/// Mollify a scalar field at scale `eps` (at least two grid cells). The mask
/// shrinks to nodes whose whole kernel footprint is valid.
pub fn mollify_scalar(f: &ScalarField, eps: f64) -> Result<ScalarField> {
    let (mut out, mask) = convolve(&f.grid, &f.mask, &[&f.values], eps)?;
    ScalarField::with_mask(f.grid.clone(), out.remove(0), mask)
}

pub fn mollify_vector(u: &VectorField, eps: f64) -> Result<VectorField> {
    let arrays: Vec<&[f64]> = u.components.iter().map(|c| c.as_slice()).collect();
    let (out, mask) = convolve(&u.grid, &u.mask, &arrays, eps)?;
    VectorField::new(u.grid.clone(), out, mask)
}
