//! Ordering along segments: for `xi` orthogonal to `z - y`, `u(y) . xi` and
//! `u(z) . xi` never have strictly opposite signs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::interp::interpolate;
use crate::par;
use crate::vector::VecN;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrderingParams {
    pub pair_count: usize,
    pub xi_per_pair: usize,
    pub delta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingViolation {
    pub y: VecN,
    pub z: VecN,
    pub xi: VecN,
    pub uy_xi: f64,
    pub uz_xi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub params: OrderingParams,
    pub pairs_tested: usize,
    pub candidates_rejected: usize,
    pub violations: usize,
    /// Largest `min(|u(y) . xi|, |u(z) . xi|)` over pairs of opposite sign, or
    /// minus that over pairs of equal sign; positive means opposite signs.
    pub worst_margin: f64,
    pub first_violation: Option<OrderingViolation>,
}

struct Candidate {
    y: VecN,
    z: VecN,
    xis: Vec<VecN>,
}

fn draw(rng: &mut ChaCha8Rng, lo: &VecN, hi: &VecN, xi_per_pair: usize) -> Option<Candidate> {
    let dim = lo.dim();
    let mut pt = || VecN::from_fn(dim, |k| lo[k] + rng.random::<f64>() * (hi[k] - lo[k]));
    let y = pt();
    let z = pt();
    let d = (z - y).normalized()?;
    let mut xis = Vec::with_capacity(xi_per_pair);
    let mut guard = 0;
    while xis.len() < xi_per_pair && guard < 100 * xi_per_pair {
        guard += 1;
        let g = VecN::from_fn(dim, |_| rng.sample(StandardNormal));
        if let Some(x) = (g - d * g.dot(&d)).normalized() {
            xis.push(x);
        }
    }
    Some(Candidate { y, z, xis })
}

/// Endpoint values if the whole segment lies in valid cells.
fn segment_values(u: &VectorField, y: &VecN, z: &VecN) -> Option<(VecN, VecN)> {
    let len = (*z - *y).norm();
    let steps = ((2.0 * len / u.grid.min_spacing()).ceil() as usize).max(1);
    for s in 1..steps {
        let t = s as f64 / steps as f64;
        interpolate(u, &(*y + (*z - *y) * t)).ok()?;
    }
    Some((interpolate(u, y).ok()?, interpolate(u, z).ok()?))
}

/// Seeded random segments `[y, z]` inside the valid region, each tested with
/// `xi_per_pair` random directions orthogonal to `z - y`. Candidates are drawn
/// in fixed-size batches from one stream, so the outcome does not depend on
/// the thread count.
pub fn ordering_check(u: &VectorField, params: OrderingParams) -> Result<OrderingReport> {
    if params.pair_count == 0 || params.xi_per_pair == 0 {
        return Err(Error::Config("pair_count and xi_per_pair must be positive".into()));
    }
    if !(params.delta >= 0.0) {
        return Err(Error::Config("delta must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (lo, hi) = (u.grid.lower(), u.grid.upper());
    let max_candidates = 50 * params.pair_count;
    let batch = 256;
    let mut drawn = 0usize;
    let mut report = OrderingReport {
        params,
        pairs_tested: 0,
        candidates_rejected: 0,
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
        first_violation: None,
    };
    while report.pairs_tested < params.pair_count && drawn < max_candidates {
        let cands: Vec<Option<Candidate>> = (0..batch)
            .map(|_| draw(&mut rng, &lo, &hi, params.xi_per_pair))
            .collect();
        drawn += batch;
        let values = par::map_slice(&cands, |c| {
            c.as_ref().and_then(|c| segment_values(u, &c.y, &c.z))
        });
        for (c, v) in cands.iter().zip(values) {
            if report.pairs_tested == params.pair_count {
                break;
            }
            let (Some(c), Some((uy, uz))) = (c, v) else {
                report.candidates_rejected += 1;
                continue;
            };
            report.pairs_tested += 1;
            for xi in &c.xis {
                let a = uy.dot(xi);
                let b = uz.dot(xi);
                // opposite signs in either order
                let margin = a.min(-b).max((-a).min(b));
                report.worst_margin = report.worst_margin.max(margin);
                if margin > params.delta {
                    report.violations += 1;
                    if report.first_violation.is_none() {
                        report.first_violation = Some(OrderingViolation {
                            y: c.y,
                            z: c.z,
                            xi: *xi,
                            uy_xi: a,
                            uz_xi: b,
                        });
                    }
                }
            }
        }
    }
    if report.pairs_tested == 0 {
        return Err(Error::NoSamples("no segment fits inside the valid region".into()));
    }
    Ok(report)
}
