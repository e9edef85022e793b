//! Pinned quadrature tolerances per (scheme, dimension, count).
//!
//! Values are the observed moment errors of the deterministic direction sets
//! (worst over 5 seeds for Monte Carlo) times a safety factor of 2, rounded up.
//! The calibration test target regenerates the measurements and fails if any
//! entry stops being an upper bound.

use serde::Serialize;

use crate::sphere::{sphere_area, DirectionSet, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentTolerance {
    /// Bound on `|sum w xi|`.
    pub first: f64,
    /// Bound on the max entry of `sum w xi xi^T - (|S|/N) Id`.
    pub second: f64,
}

/// (dim, count, first, second); Monte Carlo rows hold for seeds 1..=5.
const UNIFORM: &[(usize, usize, f64, f64)] = &[
    // exact up to rounding
    (2, 8, 1e-12, 1e-12),
    (2, 64, 1e-12, 1e-12),
    (2, 256, 1e-12, 1e-12),
    (2, 1024, 1e-12, 1e-12),
];
const FIBONACCI: &[(usize, usize, f64, f64)] = &[
    (3, 200, 7e-3, 6e-3),
    (3, 1000, 4e-4, 7e-4),
    (3, 10000, 3e-5, 3e-6),
];
const MONTE_CARLO: &[(usize, usize, f64, f64)] = &[
    (2, 1000, 0.46, 0.22),
    (2, 10000, 0.1, 0.1),
    (2, 50000, 0.07, 0.07),
    (3, 1000, 1.1, 0.46),
    (3, 10000, 0.22, 0.13),
    (3, 50000, 0.13, 0.11),
    (4, 1000, 2.4, 0.72),
    (4, 10000, 0.45, 0.26),
    (4, 50000, 0.15, 0.08),
];

/// Seeds over which the Monte Carlo rows were measured.
pub const MONTE_CARLO_SEEDS: std::ops::RangeInclusive<u64> = 1..=5;

pub fn table(scheme: Scheme) -> &'static [(usize, usize, f64, f64)] {
    match scheme {
        Scheme::UniformAngle => UNIFORM,
        Scheme::Fibonacci => FIBONACCI,
        Scheme::MonteCarlo { .. } => MONTE_CARLO,
    }
}

/// Pinned tolerance for an exact table entry.
pub fn moment_tolerance(scheme: Scheme, dim: usize, count: usize) -> Option<MomentTolerance> {
    table(scheme)
        .iter()
        .find(|r| r.0 == dim && r.1 == count)
        .map(|r| MomentTolerance { first: r.2, second: r.3 })
}

/// Observed `(|sum w xi|, max |sum w xi xi^T - (|S|/N) Id|)` of a set.
pub fn moment_errors(ds: &DirectionSet) -> (f64, f64) {
    let first = ds.first_moment().norm();
    let m = ds.second_moment();
    let s = sphere_area(ds.dim) / ds.dim as f64;
    let mut second = 0.0f64;
    for i in 0..ds.dim {
        for j in 0..ds.dim {
            let target = if i == j { s } else { 0.0 };
            second = second.max((m[(i, j)] - target).abs());
        }
    }
    (first, second)
}
