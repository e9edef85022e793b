//! The Ginzburg-Landau line energy
//! `E_eps(u) = eps int |grad u|^2 + (1/eps) int (1 - |u|^2)^2 + (1/eps) ||curl u||^2_{H^-1}`
//! on two-dimensional rectangles.

use serde::Serialize;

use crate::diff::{central, curl_residual};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::vector::VecN;

pub const CG_TOLERANCE: f64 = 1e-10;

/// Matrix-free `-Laplacian` on interior nodes with zero Dirichlet data.
struct Poisson {
    n0: usize,
    n1: usize,
    w0: f64,
    w1: f64,
}

impl Poisson {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (n0, n1) = (self.n0, self.n1);
        for i in 0..n0 {
            for j in 0..n1 {
                let k = i * n1 + j;
                let c = x[k];
                let up = if i + 1 < n0 { x[k + n1] } else { 0.0 };
                let dn = if i > 0 { x[k - n1] } else { 0.0 };
                let rt = if j + 1 < n1 { x[k + 1] } else { 0.0 };
                let lt = if j > 0 { x[k - 1] } else { 0.0 };
                out[k] = self.w0 * (2.0 * c - up - dn) + self.w1 * (2.0 * c - rt - lt);
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradients for `-Lap phi = omega` on the interior nodes.
/// Returns `phi` on the interior, row-major.
fn solve(grid: &GridSpec, rhs: &[f64]) -> Result<Vec<f64>> {
    let (n0, n1) = (grid.shape()[0] - 2, grid.shape()[1] - 2);
    let (h0, h1) = (grid.spacing()[0], grid.spacing()[1]);
    let op = Poisson {
        n0,
        n1,
        w0: 1.0 / (h0 * h0),
        w1: 1.0 / (h1 * h1),
    };
    let n = n0 * n1;
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let bnorm = dot(rhs, rhs).sqrt();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let max_iter = 10 * n;
    for _ in 0..max_iter {
        if rr.sqrt() <= CG_TOLERANCE * bnorm {
            return Ok(x);
        }
        op.apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    if rr.sqrt() <= CG_TOLERANCE * bnorm {
        return Ok(x);
    }
    Err(Error::Solver {
        iterations: max_iter,
        residual: rr.sqrt() / bnorm,
    })
}

/// `||omega||^2_{H^-1} = int phi omega` with `-Lap phi = omega`, `phi = 0` on
/// the boundary of the rectangle. Invalid nodes count as `omega = 0`.
pub fn hminus1_norm_sq(omega: &ScalarField) -> Result<f64> {
    let grid = &omega.grid;
    if grid.dim() != 2 {
        return Err(Error::Unsupported("H^-1 norm is computed on 2D rectangles".into()));
    }
    let (s0, s1) = (grid.shape()[0], grid.shape()[1]);
    let (n0, n1) = (s0 - 2, s1 - 2);
    let mut rhs = vec![0.0; n0 * n1];
    for i in 0..n0 {
        for j in 0..n1 {
            let flat = (i + 1) * s1 + (j + 1);
            if omega.mask[flat] {
                rhs[i * n1 + j] = omega.values[flat];
            }
        }
    }
    let phi = solve(grid, &rhs)?;
    // boundary nodes carry phi = 0, so the trapezoid rule reduces to interior nodes
    Ok(dot(&phi, &rhs) * grid.cell_volume())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyBreakdown {
    pub eps: f64,
    pub dirichlet: f64,
    pub penalty: f64,
    pub curl_term: f64,
    pub total: f64,
}

/// Assemble the three terms over the nodes where every central difference of
/// every component is available.
pub fn gl_energy(u: &VectorField, eps: f64) -> Result<EnergyBreakdown> {
    let grid = &u.grid;
    if grid.dim() != 2 {
        return Err(Error::Unsupported("line energy is defined in 2D".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Config("eps must be positive".into()));
    }
    let curl = curl_residual(u)?;
    let mask = &curl.mask;
    let dv = grid.cell_volume();
    let mut dirichlet = 0.0;
    let mut penalty = 0.0;
    for i in grid.indices().filter(|&i| mask[i]) {
        for c in &u.components {
            for k in 0..2 {
                let d = central(grid, c, &u.mask, i, k).expect("mask guarantees central stencil");
                dirichlet += d * d;
            }
        }
        let n2 = u.at(i).norm_sq();
        penalty += (1.0 - n2) * (1.0 - n2);
    }
    let omega = ScalarField::with_mask(grid.clone(), curl.pairs[0].values.clone(), mask.clone())?;
    let curl_term = hminus1_norm_sq(&omega)? / eps;
    let dirichlet = eps * dirichlet * dv;
    let penalty = penalty * dv / eps;
    Ok(EnergyBreakdown {
        eps,
        dirichlet,
        penalty,
        curl_term,
        total: dirichlet + penalty + curl_term,
    })
}

/// `u*(x - c) min(|x - c| / eps, 1)` on the nodes of the disk of radius
/// `disk_radius` about `c`.
pub fn regularized_vortex(grid: &GridSpec, center: &VecN, eps: f64, disk_radius: f64) -> Result<VectorField> {
    if grid.dim() != 2 || center.dim() != 2 {
        return Err(Error::Unsupported("regularized vortex is two-dimensional".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Config("eps must be positive".into()));
    }
    Ok(VectorField::from_fn(grid, |x| {
        let d = *x - *center;
        let r = d.norm();
        if r > disk_radius {
            None
        } else if r >= eps {
            Some(d * (1.0 / r))
        } else {
            Some(d * (1.0 / eps))
        }
    }))
}
