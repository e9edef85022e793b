//! Quadrature on the unit sphere S^{N-1} and the half-sphere moment identities.
//!
//! Schemes: equally spaced angles on the circle, the Fibonacci lattice on S^2,
//! and seeded uniform Monte Carlo (any dimension). All weights are equal and
//! sum to the surface measure of the sphere.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{orthonormal_complement, VecN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Scheme {
    UniformAngle,
    Fibonacci,
    MonteCarlo { seed: u64 },
}

impl Scheme {
    /// Uniform-angle in 2D, Fibonacci in 3D, Monte Carlo otherwise.
    pub fn default_for(dim: usize, seed: u64) -> Self {
        match dim {
            2 => Scheme::UniformAngle,
            3 => Scheme::Fibonacci,
            _ => Scheme::MonteCarlo { seed },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    pub dim: usize,
    pub scheme: Scheme,
    pub nodes: Vec<VecN>,
    pub weights: Vec<f64>,
}

/// Surface measure of the unit sphere S^{N-1} in R^N.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => panic!("sphere_area: dimension {dim} unsupported"),
    }
}

/// Volume of the unit ball in R^d.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        _ => panic!("ball_volume: dimension {d} unsupported"),
    }
}

pub const MIN_COUNT: usize = 4;

impl DirectionSet {
    pub fn build(dim: usize, count: usize, scheme: Scheme) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(Error::Config(format!("direction sets need 2 <= dim <= 4, got {dim}")));
        }
        if count < MIN_COUNT {
            return Err(Error::Config(format!("need at least {MIN_COUNT} directions, got {count}")));
        }
        let nodes: Vec<VecN> = match scheme {
            Scheme::UniformAngle => {
                if dim != 2 {
                    return Err(Error::Config("uniform-angle scheme is only valid for dim 2".into()));
                }
                (0..count)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / count as f64;
                        VecN::from_slice(&[t.cos(), t.sin()])
                    })
                    .collect()
            }
            Scheme::Fibonacci => {
                if dim != 3 {
                    return Err(Error::Config("fibonacci scheme is only valid for dim 3".into()));
                }
                let golden = PI * (3.0 - 5.0f64.sqrt());
                (0..count)
                    .map(|i| {
                        let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let t = golden * i as f64;
                        VecN::from_slice(&[r * t.cos(), r * t.sin(), z])
                    })
                    .collect()
            }
            Scheme::MonteCarlo { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let v = VecN::from_fn(dim, |_| StandardNormal.sample(&mut rng));
                    if let Some(u) = v.normalized() {
                        out.push(u);
                    }
                }
                out
            }
        };
        let w = sphere_area(dim) / count as f64;
        Ok(Self {
            dim,
            scheme,
            weights: vec![w; nodes.len()],
            nodes,
        })
    }

    /// Explicit nodes and weights (e.g. a single probe direction).
    pub fn from_nodes(nodes: Vec<VecN>, weights: Vec<f64>, scheme: Scheme) -> Result<Self> {
        let dim = nodes.first().map(|n| n.dim()).ok_or_else(|| Error::Config("empty direction set".into()))?;
        if nodes.len() != weights.len() || nodes.iter().any(|n| n.dim() != dim) {
            return Err(Error::Config("inconsistent direction set".into()));
        }
        if nodes.iter().any(|n| (n.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::Config("direction set nodes must be unit vectors".into()));
        }
        Ok(Self {
            dim,
            scheme,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum w xi`
    pub fn first_moment(&self) -> VecN {
        let mut m = VecN::zeros(self.dim);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            m += *x * *w;
        }
        m
    }

    /// `sum w xi (x) xi`
    pub fn second_moment(&self) -> DMatrix<f64> {
        outer_sum(self.nodes.iter().zip(&self.weights), self.dim)
    }

    /// Apply an orthogonal matrix to every node.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        Self {
            nodes: self.nodes.iter().map(|x| mat_vec(r, x)).collect(),
            ..self.clone()
        }
    }

    /// Embed an (N-1)-dimensional set as the equator S^{N-2} x {0} of S^{N-1}.
    pub fn embed_equator(&self) -> Self {
        Self {
            dim: self.dim + 1,
            scheme: self.scheme,
            nodes: self.nodes.iter().map(|x| x.extend(0.0)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Concatenate two sets of the same dimension.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Config("cannot join direction sets of different dimension".into()));
        }
        let mut out = self.clone();
        out.nodes.extend_from_slice(&other.nodes);
        out.weights.extend_from_slice(&other.weights);
        Ok(out)
    }
}

fn outer_sum<'a>(items: impl Iterator<Item = (&'a VecN, &'a f64)>, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for (x, w) in items {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += w * x[i] * x[j];
            }
        }
    }
    m
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &VecN) -> VecN {
    VecN::from_fn(m.nrows(), |i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
}

/// `sum over xi.n > 0 of w xi`. Analytically `V_{N-1} n`.
pub fn half_sphere_first_moment(ds: &DirectionSet, n: &VecN) -> VecN {
    let mut m = VecN::zeros(ds.dim);
    for (x, w) in ds.nodes.iter().zip(&ds.weights) {
        if x.dot(n) > 0.0 {
            m += *x * *w;
        }
    }
    m
}

/// Second moment of the equatorial half-sphere of `n`.
#[derive(Debug, Clone, Serialize)]
pub struct EquatorMoment {
    /// Orthonormal basis of `n`-perp in which `matrix` is expressed.
    pub basis: Vec<VecN>,
    /// `integral over the half equator of xi (x) xi`, (N-1) x (N-1).
    pub matrix: DMatrix<f64>,
    /// Same over the whole equator.
    pub full: DMatrix<f64>,
    /// `H^{N-2}(S^{N-2}) / (2 (N-1))`
    pub expected_scale: f64,
}

/// Integral of `xi (x) xi` over the half of the equator `S^{N-2}` of `n-perp`
/// where the first tangent coordinate is positive. The equatorial quadrature
/// is an (N-1)-dimensional direction set with the same count: the matching
/// Monte Carlo seed when `ds` is Monte Carlo, otherwise the default scheme.
pub fn half_sphere_second_moment(ds: &DirectionSet, n: &VecN) -> Result<EquatorMoment> {
    let dim = ds.dim;
    if dim < 3 {
        return Err(Error::Unsupported("no equatorial quadrature on S^0 (dim 2)".into()));
    }
    let n = n.normalized().ok_or_else(|| Error::Config("zero normal".into()))?;
    let sub = dim - 1;
    let scheme = match ds.scheme {
        Scheme::MonteCarlo { seed } => Scheme::MonteCarlo { seed },
        _ => Scheme::default_for(sub, 0),
    };
    let eq = DirectionSet::build(sub, ds.len().max(MIN_COUNT), scheme)?;
    let basis = orthonormal_complement(&n);
    let half = outer_sum(
        eq.nodes.iter().zip(&eq.weights).filter(|(x, _)| x[0] > 0.0),
        sub,
    );
    let full = eq.second_moment();
    Ok(EquatorMoment {
        basis,
        matrix: half,
        full,
        expected_scale: sphere_area(sub) / (2.0 * sub as f64),
    })
}
