//! Uniform Cartesian grids and node-sampled fields.
//!
//! Arrays are row-major: the last axis varies fastest. A validity mask marks
//! the nodes on which a field is meaningful; statements that hold "almost
//! everywhere" for the continuous objects are checked on masked nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{VecN, MAX_DIM};

pub const MIN_NODES_PER_AXIS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl GridSpec {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let dim = shape.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 2..=4")));
        }
        if spacing.len() != dim || origin.len() != dim {
            return Err(Error::InvalidGrid(
                "shape, spacing and origin lengths differ".into(),
            ));
        }
        if let Some(k) = shape.iter().position(|&n| n < MIN_NODES_PER_AXIS) {
            return Err(Error::InvalidGrid(format!(
                "axis {k} has {} nodes, need at least {MIN_NODES_PER_AXIS}",
                shape[k]
            )));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid("spacing must be positive and finite".into()));
        }
        if origin.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            dim,
            shape,
            spacing,
            origin,
        })
    }

    /// `n` nodes per axis spanning `[lo, hi]` in every coordinate.
    pub fn cube(dim: usize, n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("{n} nodes per axis")));
        }
        let h = (hi - lo) / (n - 1) as f64;
        Self::new(vec![n; dim], vec![h; dim], vec![lo; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Row-major strides.
    pub fn strides(&self) -> [usize; MAX_DIM] {
        let mut s = [0; MAX_DIM];
        let mut acc = 1;
        for k in (0..self.dim).rev() {
            s[k] = acc;
            acc *= self.shape[k];
        }
        s
    }

    #[inline]
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for k in (0..self.dim).rev() {
            idx[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        idx
    }

    #[inline]
    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for k in 0..self.dim {
            flat = flat * self.shape[k] + idx[k];
        }
        flat
    }

    /// Coordinates of the node with multi-index `idx`.
    #[inline]
    pub fn node(&self, idx: &[usize]) -> VecN {
        VecN::from_fn(self.dim, |k| self.origin[k] + idx[k] as f64 * self.spacing[k])
    }

    #[inline]
    pub fn coord(&self, flat: usize) -> VecN {
        self.node(&self.unravel(flat))
    }

    /// Flat index of the neighbour `delta` steps along `axis`, if inside the grid.
    #[inline]
    pub fn neighbor(&self, flat: usize, axis: usize, delta: isize) -> Option<usize> {
        let i = (flat / self.strides()[axis]) % self.shape[axis];
        let j = i as isize + delta;
        if j < 0 || j >= self.shape[axis] as isize {
            None
        } else {
            Some((flat as isize + delta * self.strides()[axis] as isize) as usize)
        }
    }

    pub fn lower(&self) -> VecN {
        VecN::from_slice(&self.origin)
    }

    pub fn upper(&self) -> VecN {
        VecN::from_fn(self.dim, |k| {
            self.origin[k] + (self.shape[k] - 1) as f64 * self.spacing[k]
        })
    }

    pub fn center(&self) -> VecN {
        (self.lower() + self.upper()) * 0.5
    }

    pub fn contains(&self, p: &VecN) -> bool {
        let (lo, hi) = (self.lower(), self.upper());
        (0..self.dim).all(|k| p[k] >= lo[k] && p[k] <= hi[k])
    }

    /// Lower corner multi-index of the cell containing `p`, with local
    /// coordinates in `[0, 1]`. Points on the upper face map to the last cell.
    pub fn locate(&self, p: &VecN) -> Option<([usize; MAX_DIM], [f64; MAX_DIM])> {
        if p.dim() != self.dim || !p.is_finite() {
            return None;
        }
        let mut idx = [0; MAX_DIM];
        let mut frac = [0.0; MAX_DIM];
        for k in 0..self.dim {
            let mut s = (p[k] - self.origin[k]) / self.spacing[k];
            // node coordinates come back within rounding of an integer
            if (s - s.round()).abs() < 1e-9 {
                s = s.round();
            }
            let last = (self.shape[k] - 1) as f64;
            if s < 0.0 || s > last {
                return None;
            }
            let i = (s.floor() as usize).min(self.shape[k] - 2);
            idx[k] = i;
            frac[k] = s - i as f64;
        }
        Some((idx, frac))
    }

    /// Nearest node by rounding each coordinate, if `p` lies in the box.
    pub fn nearest(&self, p: &VecN) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = [0; MAX_DIM];
        for k in 0..self.dim {
            let s = ((p[k] - self.origin[k]) / self.spacing[k]).round() as usize;
            idx[k] = s.min(self.shape[k] - 1);
        }
        Some(self.ravel(&idx[..self.dim]))
    }

    /// Same grid without its last axis.
    pub fn drop_last_axis(&self) -> Result<Self> {
        let d = self.dim - 1;
        Self::new(
            self.shape[..d].to_vec(),
            self.spacing[..d].to_vec(),
            self.origin[..d].to_vec(),
        )
    }

    /// Iterate over all flat indices.
    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; grid.len()];
        Self::with_mask(grid, values, mask)
    }

    /// Values at unmasked nodes may be non-finite (e.g. unreachable nodes).
    pub fn with_mask(grid: GridSpec, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || mask.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values and mask entries, got {} and {}",
                grid.len(),
                values.len(),
                mask.len()
            )));
        }
        if let Some(i) = (0..values.len()).find(|&i| mask[i] && !values[i].is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values, mask })
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(&VecN) -> f64 + Sync + Send) -> Self {
        let values = crate::par::map_range(grid.len(), |i| f(&grid.coord(i)));
        Self {
            grid: grid.clone(),
            mask: vec![true; values.len()],
            values,
        }
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: GridSpec,
    pub components: Vec<Vec<f64>>,
    pub mask: Vec<bool>,
}

impl VectorField {
    pub fn new(grid: GridSpec, components: Vec<Vec<f64>>, mask: Vec<bool>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::InvalidField(format!(
                "{} components for a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        let n = grid.len();
        if components.iter().any(|c| c.len() != n) || mask.len() != n {
            return Err(Error::InvalidField(format!(
                "component or mask length differs from {n} nodes"
            )));
        }
        for i in 0..n {
            if mask[i] && components.iter().any(|c| !c[i].is_finite()) {
                return Err(Error::InvalidField(format!("non-finite value at node {i}")));
            }
        }
        Ok(Self {
            grid,
            components,
            mask,
        })
    }

    /// Sample `f` at every node; `None` marks the node invalid (stored as zero).
    pub fn from_fn(grid: &GridSpec, f: impl Fn(&VecN) -> Option<VecN> + Sync + Send) -> Self {
        let dim = grid.dim();
        let samples = crate::par::map_range(grid.len(), |i| f(&grid.coord(i)));
        let mut components = vec![vec![0.0; grid.len()]; dim];
        let mut mask = vec![false; grid.len()];
        for (i, s) in samples.into_iter().enumerate() {
            if let Some(v) = s {
                debug_assert_eq!(v.dim(), dim);
                for k in 0..dim {
                    components[k][i] = v[k];
                }
                mask[i] = true;
            }
        }
        Self {
            grid: grid.clone(),
            components,
            mask,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    #[inline]
    pub fn at(&self, flat: usize) -> VecN {
        VecN::from_fn(self.dim(), |k| self.components[k][flat])
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn masked_indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    /// Largest `| |u| - 1 |` over masked nodes.
    pub fn unit_norm_defect(&self) -> f64 {
        crate::par::max0(
            self.masked_indices()
                .into_iter()
                .map(|i| (self.at(i).norm() - 1.0).abs()),
        )
    }

    /// Fails unless `| |u| - 1 | <= tol` at every masked node.
    pub fn check_unit_norm(&self, tol: f64) -> Result<()> {
        let d = self.unit_norm_defect();
        if d <= tol {
            Ok(())
        } else {
            Err(Error::InvalidField(format!(
                "unit-norm defect {d:e} exceeds {tol:e}"
            )))
        }
    }

    /// Pointwise negation (mask unchanged).
    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|x| -x).collect())
                .collect(),
            mask: self.mask.clone(),
        }
    }
}
