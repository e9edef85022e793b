//! Shape operators of level sets and umbilicity.
//!
//! Sign convention: `S = P (grad n) P` with `n = grad psi / |grad psi|` and
//! `P = I - n n^T`, so the sphere `psi = |x|` has `S = (1/r) Id`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::diff::gradient;
use crate::error::{Error, Result};
use crate::grid::{ScalarField, VectorField};
use crate::interp::{interpolate, interpolate_arrays};
use crate::vector::{orthonormal_complement, VecN};
use crate::verdict::Verdict;

pub const DEFAULT_GRADIENT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ShapeOperator {
    pub point: VecN,
    pub normal: VecN,
    pub gradient_norm: f64,
    /// Orthonormal basis of the tangent space in which `matrix` is written.
    pub basis: Vec<VecN>,
    /// Symmetrized `(N-1) x (N-1)` shape operator.
    pub matrix: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `max |S - S^T|` before symmetrization.
    pub asymmetry: f64,
}

/// Gradient and Jacobian of the unit normal, computed once per field.
#[derive(Debug, Clone)]
pub struct ShapeOperatorField {
    grad: VectorField,
    /// `jac[i * N + k] = d_k n_i`
    jac: Vec<Vec<f64>>,
    jac_mask: Vec<bool>,
    floor: f64,
}

impl ShapeOperatorField {
    pub fn new(psi: &ScalarField, floor: f64) -> Result<Self> {
        let grad = gradient(psi)?;
        let dim = grad.dim();
        let n = grad.grid.len();
        let mut unit = vec![vec![0.0; n]; dim];
        let mut unit_mask = vec![false; n];
        for i in 0..n {
            if !psi.mask[i] {
                continue;
            }
            let g = grad.at(i);
            let norm = g.norm();
            if norm >= floor {
                unit_mask[i] = true;
                for k in 0..dim {
                    unit[k][i] = g[k] / norm;
                }
            }
        }
        let mut jac = Vec::with_capacity(dim * dim);
        let mut jac_mask = vec![true; n];
        for comp in unit {
            let f = ScalarField::with_mask(grad.grid.clone(), comp, unit_mask.clone())?;
            let d = gradient(&f)?;
            for (m, dm) in jac_mask.iter_mut().zip(&d.mask) {
                *m &= *dm;
            }
            jac.extend(d.components);
        }
        Ok(Self {
            grad,
            jac,
            jac_mask,
            floor,
        })
    }

    pub fn dim(&self) -> usize {
        self.grad.dim()
    }

    pub fn at(&self, x: &VecN) -> Result<ShapeOperator> {
        let dim = self.dim();
        let g = interpolate(&self.grad, x)?;
        let norm = g.norm();
        if norm < self.floor {
            return Err(Error::CriticalPoint {
                norm,
                floor: self.floor,
            });
        }
        let n = g * (1.0 / norm);
        let arrays: Vec<&[f64]> = self.jac.iter().map(|a| a.as_slice()).collect();
        let j = interpolate_arrays(&self.grad.grid, &self.jac_mask, &arrays, x)?;
        let basis = orthonormal_complement(&n);
        let m = basis.len();
        let mut s = DMatrix::<f64>::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let mut acc = 0.0;
                for i in 0..dim {
                    for k in 0..dim {
                        acc += basis[a][i] * j[i * dim + k] * basis[b][k];
                    }
                }
                s[(a, b)] = acc;
            }
        }
        let asymmetry = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .map(|(a, b)| (s[(a, b)] - s[(b, a)]).abs())
            .fold(0.0, f64::max);
        let sym = (&s + s.transpose()) * 0.5;
        let mut eigenvalues: Vec<f64> = sym.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
        eigenvalues.sort_by(f64::total_cmp);
        Ok(ShapeOperator {
            point: *x,
            normal: n,
            gradient_norm: norm,
            basis,
            matrix: sym,
            eigenvalues,
            asymmetry,
        })
    }
}

/// Shape operator of the level set of `psi` through `x`.
pub fn shape_operator(psi: &ScalarField, x: &VecN) -> Result<ShapeOperator> {
    ShapeOperatorField::new(psi, DEFAULT_GRADIENT_FLOOR)?.at(x)
}

/// Points of `{psi = alpha}` on grid edges, by linear root-finding along each
/// edge between valid nodes. Deterministic order.
pub fn level_points(psi: &ScalarField, alpha: f64) -> Vec<VecN> {
    let grid = &psi.grid;
    let dim = grid.dim();
    let mut out = Vec::new();
    for i in grid.indices() {
        if !psi.mask[i] {
            continue;
        }
        let fi = psi.values[i] - alpha;
        if fi == 0.0 {
            out.push(grid.coord(i));
            continue;
        }
        for k in 0..dim {
            let Some(j) = grid.neighbor(i, k, 1) else { continue };
            if !psi.mask[j] {
                continue;
            }
            let fj = psi.values[j] - alpha;
            if fi * fj < 0.0 {
                let t = fi / (fi - fj);
                let mut p = grid.coord(i);
                p[k] += t * grid.spacing()[k];
                out.push(p);
            }
        }
    }
    out
}

/// Up to `count` evenly strided elements.
fn stride<T: Copy>(items: &[T], count: usize) -> Vec<T> {
    if items.len() <= count {
        return items.to_vec();
    }
    (0..count).map(|s| items[s * items.len() / count]).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct UmbilicSample {
    pub point: VecN,
    pub lambda: f64,
    pub deviation: f64,
    pub eigenvalues: Vec<f64>,
    pub normal: VecN,
}

#[derive(Debug, Clone, Serialize)]
pub struct UmbilicReport {
    pub alpha: f64,
    pub samples: Vec<UmbilicSample>,
    pub max_deviation: f64,
    /// Largest `max eig - min eig` over samples.
    pub eigen_spread: f64,
    pub umbilical: bool,
    /// Mean of `x - n / lambda`, when umbilical with `|lambda|` bounded away from 0.
    pub center_estimate: Option<VecN>,
    pub center_spread: Option<f64>,
    pub tol: f64,
    pub verdict: Verdict,
}

/// Shape operators at up to `sample_count` points of `{psi = alpha}`;
/// umbilical when every `|| S - lambda Id ||` is at most `tol`.
pub fn umbilic_check(psi: &ScalarField, alpha: f64, sample_count: usize, tol: f64) -> Result<UmbilicReport> {
    if psi.grid.dim() < 3 {
        return Err(Error::Unsupported("umbilicity needs N >= 3".into()));
    }
    let field = ShapeOperatorField::new(psi, DEFAULT_GRADIENT_FLOOR)?;
    let candidates = level_points(psi, alpha);
    let ops: Vec<ShapeOperator> = crate::par::map_slice(&candidates, |p| field.at(p).ok())
        .into_iter()
        .flatten()
        .collect();
    let ops = stride(&ops.iter().collect::<Vec<_>>(), sample_count.max(1));
    if ops.is_empty() {
        return Err(Error::NoSamples(format!("level set psi = {alpha} has no usable points")));
    }
    let samples: Vec<UmbilicSample> = ops
        .iter()
        .map(|s| {
            let lambda = s.eigenvalues.iter().sum::<f64>() / s.eigenvalues.len() as f64;
            let deviation = s.eigenvalues.iter().map(|e| (e - lambda).abs()).fold(0.0, f64::max);
            UmbilicSample {
                point: s.point,
                lambda,
                deviation,
                eigenvalues: s.eigenvalues.clone(),
                normal: s.normal,
            }
        })
        .collect();
    let max_deviation = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let eigen_spread = samples
        .iter()
        .map(|s| s.eigenvalues[s.eigenvalues.len() - 1] - s.eigenvalues[0])
        .fold(0.0, f64::max);
    let umbilical = max_deviation <= tol;
    let (center_estimate, center_spread) = if umbilical && samples.iter().all(|s| s.lambda.abs() >= 10.0 * tol) {
        let centers: Vec<VecN> = samples.iter().map(|s| s.point - s.normal * (1.0 / s.lambda)).collect();
        let mut mean = VecN::zeros(psi.grid.dim());
        for c in &centers {
            mean += *c * (1.0 / centers.len() as f64);
        }
        let spread = centers.iter().map(|c| (*c - mean).norm()).fold(0.0, f64::max);
        (Some(mean), Some(spread))
    } else {
        (None, None)
    };
    Ok(UmbilicReport {
        alpha,
        samples,
        max_deviation,
        eigen_spread,
        umbilical,
        center_estimate,
        center_spread,
        tol,
        verdict: if umbilical { Verdict::Pass } else { Verdict::Fail },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureProfile {
    pub alpha: f64,
    pub points: Vec<VecN>,
    pub curvature: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl CurvatureProfile {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }

    /// Keep the samples accepted by `keep`, e.g. one component of the level
    /// set. `None` if nothing is left.
    pub fn restrict(&self, keep: impl Fn(&VecN) -> bool) -> Option<Self> {
        let (points, curvature): (Vec<VecN>, Vec<f64>) = self
            .points
            .iter()
            .zip(&self.curvature)
            .filter(|(p, _)| keep(p))
            .map(|(p, c)| (*p, *c))
            .unzip();
        profile(self.alpha, points, curvature)
    }
}

fn profile(alpha: f64, points: Vec<VecN>, curvature: Vec<f64>) -> Option<CurvatureProfile> {
    if curvature.is_empty() {
        return None;
    }
    let min = curvature.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = curvature.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = curvature.iter().sum::<f64>() / curvature.len() as f64;
    Some(CurvatureProfile {
        alpha,
        points,
        curvature,
        min,
        max,
        mean,
    })
}

/// Curvature of the planar level curve `{psi = alpha}` at up to
/// `sample_count` points, with the same sign convention as the shape operator.
/// Points within `margin` of the grid box boundary are skipped.
pub fn curvature_profile_2d(psi: &ScalarField, alpha: f64, sample_count: usize, margin: f64) -> Result<CurvatureProfile> {
    if psi.grid.dim() != 2 {
        return Err(Error::Unsupported("curvature profile is two-dimensional".into()));
    }
    let field = ShapeOperatorField::new(psi, DEFAULT_GRADIENT_FLOOR)?;
    let (lo, hi) = (psi.grid.lower(), psi.grid.upper());
    let candidates: Vec<VecN> = level_points(psi, alpha)
        .into_iter()
        .filter(|p| (0..2).all(|k| p[k] - lo[k] >= margin && hi[k] - p[k] >= margin))
        .collect();
    let found: Vec<(VecN, f64)> = crate::par::map_slice(&candidates, |p| field.at(p).ok().map(|s| (*p, s.matrix[(0, 0)])))
        .into_iter()
        .flatten()
        .collect();
    let found = stride(&found, sample_count.max(1));
    profile(alpha, found.iter().map(|f| f.0).collect(), found.iter().map(|f| f.1).collect())
        .ok_or_else(|| Error::NoSamples(format!("level set psi = {alpha} has no usable points")))
}
