//! Traces on segments and characteristic curves.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::interp::interpolate;
use crate::vector::{orthonormal_complement, VecN};

pub const DEFAULT_TRACE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct TraceSample {
    pub t: f64,
    pub point: VecN,
    /// Cross-section average at the smallest radius, normalized when reliable.
    pub value: VecN,
    /// `|average|` before normalization.
    pub raw_norm: f64,
    /// `|average(r_last) - average(r_prev)|`, absent with a single radius.
    pub cauchy: Option<f64>,
    pub reliable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceField {
    pub a: VecN,
    pub b: VecN,
    pub radii_used: Vec<f64>,
    pub tolerance: f64,
    pub samples: Vec<TraceSample>,
}

impl TraceField {
    pub fn reliable(&self) -> impl Iterator<Item = &TraceSample> {
        self.samples.iter().filter(|s| s.reliable)
    }
}

/// Average of `u` over the cross-section cube `(-r, r)^{N-1}` spanned by
/// `basis` at `x`; `None` when fewer than half the points are valid.
fn cross_average(u: &VectorField, x: &VecN, basis: &[VecN], r: f64) -> Option<VecN> {
    let h = u.grid.min_spacing();
    let m = (2.0 * (r / h).ceil()) as usize;
    let m = m.max(2);
    let k = basis.len();
    let total = m.pow(k as u32);
    let mut acc = VecN::zeros(u.dim());
    let mut valid = 0usize;
    for idx in 0..total {
        let mut p = *x;
        let mut rem = idx;
        for b in basis {
            let j = rem % m;
            rem /= m;
            // midpoints of m equal subintervals of (-r, r)
            let s = -r + (2.0 * j as f64 + 1.0) * r / m as f64;
            p += *b * s;
        }
        if let Ok(v) = interpolate(u, &p) {
            acc += v;
            valid += 1;
        }
    }
    if 2 * valid < total {
        None
    } else {
        Some(acc * (1.0 / valid as f64))
    }
}

/// Cross-sectional averages of `u` over shrinking cubes around `[A, B]`.
/// Radii below `4h` are dropped; the limit is the value at the smallest
/// remaining radius and the last two radii give a Cauchy diagnostic.
pub fn trace_on_segment(
    u: &VectorField,
    a: &VecN,
    b: &VecN,
    radii: &[f64],
    tolerance: f64,
) -> Result<TraceField> {
    let dim = u.dim();
    if a.dim() != dim || b.dim() != dim {
        return Err(Error::Config("segment endpoints have the wrong dimension".into()));
    }
    let d = (*b - *a)
        .normalized()
        .ok_or_else(|| Error::Geometry("degenerate segment".into()))?;
    let h = u.grid.max_spacing();
    let mut radii: Vec<f64> = radii.iter().cloned().filter(|&r| r >= 4.0 * h - 1e-12).collect();
    radii.sort_by(|x, y| y.total_cmp(x));
    radii.dedup();
    if radii.is_empty() {
        return Err(Error::Config(format!("no radius at least 4h = {}", 4.0 * h)));
    }
    let basis = orthonormal_complement(&d);
    // the tube's cross-section cube reaches r * sqrt(N-1) from the axis
    let reach = radii[0] * ((dim - 1) as f64).sqrt();
    let (lo, hi) = (u.grid.lower(), u.grid.upper());
    for p in [a, b] {
        for k in 0..dim {
            let spread = reach * (1.0 - d[k] * d[k]).max(0.0).sqrt();
            if p[k] - spread < lo[k] || p[k] + spread > hi[k] {
                return Err(Error::Geometry(format!(
                    "tube of radius {} around the segment leaves the grid box",
                    radii[0]
                )));
            }
        }
    }
    let len = (*b - *a).norm();
    let count = ((len / h).round() as usize).max(1) + 1;
    let samples = crate::par::map_range(count, |i| {
        let t = i as f64 / (count - 1) as f64;
        let x = *a + (*b - *a) * t;
        let avgs: Vec<Option<VecN>> = radii.iter().map(|&r| cross_average(u, &x, &basis, r)).collect();
        let last = avgs[avgs.len() - 1];
        let cauchy = if avgs.len() >= 2 {
            match (avgs[avgs.len() - 2], last) {
                (Some(p), Some(q)) => Some((q - p).norm()),
                _ => None,
            }
        } else {
            None
        };
        match last {
            Some(v) => {
                let n = v.norm();
                let reliable = (n - 1.0).abs() <= tolerance;
                TraceSample {
                    t,
                    point: x,
                    value: if reliable { v * (1.0 / n) } else { v },
                    raw_norm: n,
                    cauchy,
                    reliable,
                }
            }
            None => TraceSample {
                t,
                point: x,
                value: VecN::zeros(dim),
                raw_norm: 0.0,
                cauchy,
                reliable: false,
            },
        }
    });
    Ok(TraceField {
        a: *a,
        b: *b,
        radii_used: radii,
        tolerance,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Characteristic {
    pub points: Vec<VecN>,
    /// Largest distance of a vertex from the chord through the end points.
    pub max_deviation: f64,
    pub length: f64,
}

/// Integrate `x' = u(x)` with the midpoint rule and a fixed step until the
/// path leaves the valid region or reaches `max_len`.
pub fn characteristic_trace(u: &VectorField, x0: &VecN, step: f64, max_len: f64) -> Result<Characteristic> {
    if !(step > 0.0) || !(max_len > 0.0) {
        return Err(Error::Config("step and max_len must be positive".into()));
    }
    let mut points = Vec::new();
    if interpolate(u, x0).is_err() {
        return Ok(Characteristic {
            points,
            max_deviation: 0.0,
            length: 0.0,
        });
    }
    points.push(*x0);
    let mut x = *x0;
    let mut length = 0.0;
    while length + step <= max_len + 1e-12 {
        let Ok(k1) = interpolate(u, &x) else { break };
        let Ok(k2) = interpolate(u, &(x + k1 * (0.5 * step))) else { break };
        let next = x + k2 * step;
        if interpolate(u, &next).is_err() {
            break;
        }
        length += (next - x).norm();
        x = next;
        points.push(x);
    }
    let max_deviation = chord_deviation(&points);
    Ok(Characteristic {
        points,
        max_deviation,
        length,
    })
}

fn chord_deviation(points: &[VecN]) -> f64 {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return 0.0;
    };
    let Some(d) = (*last - *first).normalized() else {
        return 0.0;
    };
    points
        .iter()
        .map(|p| {
            let w = *p - *first;
            (w - d * w.dot(&d)).norm()
        })
        .fold(0.0, f64::max)
}
