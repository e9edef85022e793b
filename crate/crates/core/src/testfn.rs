//! Smooth compactly supported test functions and the pairings against them.
//!
//! The profile is the standard bump `exp(-1 / (1 - |x-c|^2 / r^2))` inside the
//! ball of radius `r`, zero outside. Gradients are evaluated in closed form so
//! that pairings with discontinuous integrands do not pick up differencing
//! error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::vector::{VecN, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: VecN,
    pub radius: f64,
}

/// What to pair the sampled function with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pairing {
    /// `integral of f * phi`
    Value,
    /// `integral of f * (v . grad phi)`
    GradientDot(VecN),
}

impl TestFunction {
    pub fn new(center: VecN, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::Config(format!(
                "test function radius must be positive, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    #[inline]
    fn scaled_sq(&self, x: &VecN) -> f64 {
        (*x - self.center).norm_sq() / (self.radius * self.radius)
    }

    #[inline]
    pub fn value(&self, x: &VecN) -> f64 {
        let s = self.scaled_sq(x);
        if s < 1.0 {
            (-1.0 / (1.0 - s)).exp()
        } else {
            0.0
        }
    }

    #[inline]
    pub fn gradient(&self, x: &VecN) -> VecN {
        let s = self.scaled_sq(x);
        if s < 1.0 {
            let t = 1.0 - s;
            let phi = (-1.0 / t).exp();
            (*x - self.center) * (-2.0 * phi / (t * t * self.radius * self.radius))
        } else {
            VecN::zeros(x.dim())
        }
    }

    /// Closed support ball strictly inside the bounding box of `grid`.
    pub fn fits_box(&self, grid: &GridSpec) -> bool {
        let (lo, hi) = (grid.lower(), grid.upper());
        self.center.dim() == grid.dim()
            && (0..grid.dim())
                .all(|k| self.center[k] - self.radius > lo[k] && self.center[k] + self.radius < hi[k])
    }

    /// Nodes where the profile is positive, with values and gradients.
    /// Fails unless the ball fits the box and every such node is valid.
    pub fn sample(&self, grid: &GridSpec, mask: &[bool]) -> Result<SampledTestFunction> {
        let violation = || Error::SupportViolation {
            center: self.center.to_vec(),
            radius: self.radius,
        };
        if !self.fits_box(grid) {
            return Err(violation());
        }
        let dim = grid.dim();
        let mut lo = [0usize; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        for k in 0..dim {
            let h = grid.spacing()[k];
            let o = grid.origin()[k];
            let a = ((self.center[k] - self.radius - o) / h).floor().max(0.0) as usize;
            let b = ((self.center[k] + self.radius - o) / h).ceil() as usize;
            lo[k] = a;
            hi[k] = b.min(grid.shape()[k] - 1);
        }
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        let mut gradients = Vec::new();
        let mut idx = lo;
        loop {
            let x = grid.node(&idx[..dim]);
            let phi = self.value(&x);
            if phi > 0.0 {
                let flat = grid.ravel(&idx[..dim]);
                if !mask[flat] {
                    return Err(violation());
                }
                nodes.push(flat);
                values.push(phi);
                gradients.push(self.gradient(&x));
            }
            // odometer over the index box, last axis fastest
            let mut k = dim;
            loop {
                if k == 0 {
                    return Ok(SampledTestFunction {
                        phi: *self,
                        cell_volume: grid.cell_volume(),
                        nodes,
                        values,
                        gradients,
                    });
                }
                k -= 1;
                if idx[k] < hi[k] {
                    idx[k] += 1;
                    break;
                }
                idx[k] = lo[k];
            }
        }
    }

    /// Up to `count` test functions of the given radius centred on successive
    /// Halton points of the box, skipping any whose support touches invalid
    /// nodes. Deterministic.
    pub fn halton_family(grid: &GridSpec, mask: &[bool], count: usize, radius: f64) -> Vec<Self> {
        let dim = grid.dim();
        let (lo, hi) = (grid.lower(), grid.upper());
        let margin = radius + 0.5 * grid.max_spacing();
        let mut out = Vec::with_capacity(count);
        let max_attempts = 64 * count.max(1);
        for n in 1..=max_attempts {
            if out.len() == count {
                break;
            }
            let c = VecN::from_fn(dim, |k| {
                let t = halton(n, PRIMES[k]);
                lo[k] + margin + t * (hi[k] - lo[k] - 2.0 * margin)
            });
            if let Ok(phi) = TestFunction::new(c, radius) {
                if phi.sample(grid, mask).is_ok() {
                    out.push(phi);
                }
            }
        }
        out
    }
}

const PRIMES: [usize; MAX_DIM] = [2, 3, 5, 7];

/// Radical inverse of `n` in `base`.
pub fn halton(mut n: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while n > 0 {
        f /= base as f64;
        r += f * (n % base) as f64;
        n /= base;
    }
    r
}

/// A test function restricted to the grid nodes of its support.
#[derive(Debug, Clone)]
pub struct SampledTestFunction {
    pub phi: TestFunction,
    pub cell_volume: f64,
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
    pub gradients: Vec<VecN>,
}

impl SampledTestFunction {
    /// Node-sum quadrature of the pairing with `f` (given per flat index).
    /// The profile vanishes to all orders at the support boundary, so the
    /// trapezoidal and midpoint rules coincide with this sum.
    pub fn integrate(&self, f: impl Fn(usize) -> f64, mode: Pairing) -> f64 {
        let mut s = 0.0;
        match mode {
            Pairing::Value => {
                for (n, &flat) in self.nodes.iter().enumerate() {
                    s += f(flat) * self.values[n];
                }
            }
            Pairing::GradientDot(v) => {
                for (n, &flat) in self.nodes.iter().enumerate() {
                    s += f(flat) * v.dot(&self.gradients[n]);
                }
            }
        }
        s * self.cell_volume
    }
}

/// `integral of f * phi` or `integral of f * (v . grad phi)` by node quadrature.
pub fn integrate_against(
    grid: &GridSpec,
    f: &[f64],
    mask: &[bool],
    phi: &TestFunction,
    mode: Pairing,
) -> Result<f64> {
    if f.len() != grid.len() || mask.len() != grid.len() {
        return Err(Error::InvalidField("array length differs from grid".into()));
    }
    let sampled = phi.sample(grid, mask)?;
    Ok(sampled.integrate(|i| f[i], mode))
}
