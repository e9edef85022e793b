//! Fields that do not depend on `x_N` in the kinetic sense: symmetry of the
//! last row of the Jacobian, reduction to dimension N-1, and the two-variable
//! stream form `psi(alpha, x_N)`.

use serde::Serialize;

use crate::diff::curl_pairs;
use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::vector::VecN;
use crate::verdict::Verdict;

pub const DEFAULT_POLE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CurlSymmetryReport {
    /// `max |d_k u_N - d_N u_k|` per `k < N`.
    pub per_axis: Vec<f64>,
    pub max_abs: f64,
}

/// Largest `|d_k u_N - d_N u_k|` over `k < N` on masked interior nodes.
pub fn curl_symmetry_check(u: &VectorField) -> Result<CurlSymmetryReport> {
    let dim = u.dim();
    if dim < 3 {
        return Err(Error::Unsupported("curl symmetry check needs N >= 3".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..dim - 1).map(|k| (k, dim - 1)).collect();
    let report = curl_pairs(u, &pairs)?;
    let per_axis: Vec<f64> = report
        .pairs
        .iter()
        .map(|p| {
            p.values
                .iter()
                .zip(&report.mask)
                .filter(|(_, m)| **m)
                .map(|(v, _)| v.abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(CurlSymmetryReport {
        max_abs: per_axis.iter().cloned().fold(0.0, f64::max),
        per_axis,
    })
}

#[derive(Debug, Clone)]
pub struct Reduction {
    /// `(N-1)`-dimensional field on the grid without its last axis.
    pub field: VectorField,
    /// `max |u'/|u'| - u_tilde|` over masked nodes.
    pub max_slice_deviation: f64,
    pub floor: f64,
    pub columns_valid: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionSummary {
    pub max_slice_deviation: f64,
    pub floor: f64,
    pub columns_valid: usize,
}

impl Reduction {
    pub fn summary(&self) -> ReductionSummary {
        ReductionSummary {
            max_slice_deviation: self.max_slice_deviation,
            floor: self.floor,
            columns_valid: self.columns_valid,
        }
    }
}

/// Average `u'/|u'|` along `x_N` and renormalize. Fails with the offending
/// nodes when `|u'|` drops below `floor` on a masked node.
pub fn dimensional_reduce(u: &VectorField, floor: f64) -> Result<Reduction> {
    let dim = u.dim();
    if dim < 4 {
        return Err(Error::Unsupported(format!(
            "dimensional reduction needs N >= 4, field has N = {dim}"
        )));
    }
    let sub = u.grid.drop_last_axis()?;
    let nn = u.grid.shape()[dim - 1];
    let m = dim - 1;
    let mut poles = Vec::new();
    for i in u.grid.indices().filter(|&i| u.mask[i]) {
        let head = u.at(i).head();
        if head.norm() < floor {
            poles.push(i);
        }
    }
    if !poles.is_empty() {
        return Err(Error::NearPole {
            count: poles.len(),
            floor,
            first: poles.into_iter().take(8).collect(),
        });
    }
    let cols = crate::par::map_range(sub.len(), |c| {
        let mut acc = VecN::zeros(m);
        let mut dirs = Vec::with_capacity(nn);
        for j in 0..nn {
            let i = c * nn + j;
            if u.mask[i] {
                let head = u.at(i).head();
                let d = head * (1.0 / head.norm());
                acc += d;
                dirs.push(d);
            }
        }
        let mean = acc.normalized()?;
        let dev = dirs.iter().map(|d| (*d - mean).norm()).fold(0.0, f64::max);
        Some((mean, dev))
    });
    let mut components = vec![vec![0.0; sub.len()]; m];
    let mut mask = vec![false; sub.len()];
    let mut max_dev = 0.0f64;
    for (c, col) in cols.into_iter().enumerate() {
        if let Some((v, dev)) = col {
            mask[c] = true;
            for k in 0..m {
                components[k][c] = v[k];
            }
            max_dev = max_dev.max(dev);
        }
    }
    let columns_valid = mask.iter().filter(|m| **m).count();
    Ok(Reduction {
        field: VectorField::new(sub, components, mask)?,
        max_slice_deviation: max_dev,
        floor,
        columns_valid,
    })
}

/// Label of a reduced field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum ReductionLabel {
    Constant { w: VecN },
    Vortex { center: VecN, sign: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct StreamFormReport {
    pub label: ReductionLabel,
    pub bin_width: f64,
    pub bins_used: usize,
    /// Largest within-bin standard deviation of `u_N`.
    pub max_std_un: f64,
    /// Largest within-bin standard deviation of `|u'|`.
    pub max_std_norm: f64,
    /// `max |u'/|u'| - e(x')|` with `e` the labelled direction field; vortex
    /// labels skip nodes closer than `4h` to the axis.
    pub alignment_defect: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Bin masked nodes by `(alpha(x'), x_N)` with cells of width `h` and measure
/// how far `u_N` and `|u'|` are from being functions of the bin.
pub fn stream_form_check(u: &VectorField, label: Option<ReductionLabel>, tolerance: f64) -> Result<StreamFormReport> {
    let label = label.ok_or_else(|| Error::Precondition("reduction has no Constant or Vortex label".into()))?;
    let dim = u.dim();
    if dim < 3 {
        return Err(Error::Unsupported("stream form needs N >= 3".into()));
    }
    let h = u.grid.max_spacing();
    let nn = u.grid.shape()[dim - 1];
    let mut bins: std::collections::BTreeMap<(i64, usize), (Vec<f64>, Vec<f64>)> = Default::default();
    let mut alignment = 0.0f64;
    for i in u.grid.indices().filter(|&i| u.mask[i]) {
        let x = u.grid.coord(i);
        let xh = x.head();
        let v = u.at(i);
        let vh = v.head();
        let (alpha, dir) = match label {
            ReductionLabel::Constant { w } => (w.dot(&xh), Some(w)),
            ReductionLabel::Vortex { center, sign } => {
                let d = xh - center;
                let r = d.norm();
                (r, if r >= 4.0 * h { Some(d * (sign / r)) } else { None })
            }
        };
        if let (Some(e), Some(n)) = (dir, vh.normalized()) {
            alignment = alignment.max((n - e).norm());
        }
        let key = ((alpha / h).floor() as i64, i % nn);
        let entry = bins.entry(key).or_default();
        entry.0.push(v[dim - 1]);
        entry.1.push(vh.norm());
    }
    let mut max_un = 0.0f64;
    let mut max_norm = 0.0f64;
    let mut used = 0;
    for (a, b) in bins.values() {
        if a.len() >= 2 {
            used += 1;
            max_un = max_un.max(std_dev(a));
            max_norm = max_norm.max(std_dev(b));
        }
    }
    if used == 0 {
        return Err(Error::NoSamples("no bin holds two or more nodes".into()));
    }
    let worst = max_un.max(max_norm).max(alignment);
    Ok(StreamFormReport {
        label,
        bin_width: h,
        bins_used: used,
        max_std_un: max_un,
        max_std_norm: max_norm,
        alignment_defect: alignment,
        tolerance,
        verdict: Verdict::from_bound(worst, tolerance),
    })
}
