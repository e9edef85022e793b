//! Lines in R^N and the parallel/concurrent classification of line families.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::VecN;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: VecN,
    pub direction: VecN,
}

impl Line {
    /// Normalizes `direction`.
    pub fn new(point: VecN, direction: VecN) -> Result<Self> {
        if point.dim() != direction.dim() {
            return Err(Error::Geometry("point and direction dimensions differ".into()));
        }
        let direction = direction
            .normalized()
            .ok_or_else(|| Error::Geometry("zero line direction".into()))?;
        Ok(Self { point, direction })
    }

    pub fn distance(&self, x: &VecN) -> f64 {
        let w = *x - self.point;
        (w - self.direction * w.dot(&self.direction)).norm()
    }

    /// Parse `p_1,..,p_N,d_1,..,d_N` rows; blank lines and `#` comments skipped.
    pub fn parse_csv(text: &str) -> Result<Vec<Line>> {
        let mut out = Vec::new();
        for (n, row) in text.lines().enumerate() {
            let row = row.trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> =
                row.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vals = match vals {
                Ok(v) => v,
                // tolerate one header row
                Err(_) if out.is_empty() && n == 0 => continue,
                Err(e) => return Err(Error::Config(format!("line {}: {e}", n + 1))),
            };
            if vals.len() % 2 != 0 || !(4..=8).contains(&vals.len()) {
                return Err(Error::Config(format!(
                    "line {}: expected 2N values with 2 <= N <= 4, got {}",
                    n + 1,
                    vals.len()
                )));
            }
            let d = vals.len() / 2;
            out.push(Line::new(VecN::from_slice(&vals[..d]), VecN::from_slice(&vals[d..]))?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Coplanarity {
    pub coplanar: bool,
    /// Third singular value of the rows `{d1, d2, p2 - p1}`.
    pub defect: f64,
}

fn singular_values(rows: &[VecN]) -> Vec<f64> {
    let dim = rows[0].dim();
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Coplanar iff the third singular value of `{d1, d2, p2 - p1}` is at most
/// `tol * max(1, |p2 - p1|)`.
pub fn coplanar(l1: &Line, l2: &Line, tol: f64) -> Coplanarity {
    let dp = l2.point - l1.point;
    let s = singular_values(&[l1.direction, l2.direction, dp]);
    let defect = s.get(2).cloned().unwrap_or(0.0);
    Coplanarity {
        coplanar: defect <= tol * dp.norm().max(1.0),
        defect,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineFamilyTag {
    Planar,
    Parallel,
    Concurrent,
    Incoherent,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineFamilyClass {
    pub tag: LineFamilyTag,
    pub point: Option<VecN>,
    /// Worst pairwise coplanarity defect.
    pub residual: f64,
    /// Largest distance from the concurrency point to a line, when fitted.
    pub fit_residual: Option<f64>,
    pub witness: Option<(usize, usize)>,
}

/// Least-squares point minimizing the summed squared distances to the lines,
/// from `sum (I - d d^T) O = sum (I - d d^T) p`. `None` when the system is
/// singular.
pub fn concurrency_point(lines: &[Line]) -> Option<VecN> {
    let dim = lines.first()?.point.dim();
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    for l in lines {
        let d = &l.direction;
        for i in 0..dim {
            for j in 0..dim {
                let pij = if i == j { 1.0 } else { 0.0 } - d[i] * d[j];
                a[(i, j)] += pij;
                b[i] += pij * l.point[j];
            }
        }
    }
    let eig = a.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 1e-9 * lines.len() as f64 {
        return None;
    }
    let x = a.cholesky()?.solve(&b);
    Some(VecN::from_fn(dim, |k| x[k]))
}

fn all_parallel(lines: &[Line], tol: f64) -> bool {
    lines.iter().enumerate().all(|(i, a)| {
        lines[i + 1..]
            .iter()
            .all(|b| a.direction.dot(&b.direction).abs() >= 1.0 - tol)
    })
}

/// Whether points and directions fit one affine 2-plane.
fn planar(lines: &[Line], tol: f64) -> bool {
    let dim = lines[0].point.dim();
    if dim <= 2 {
        return true;
    }
    let n = lines.len() as f64;
    let mut mean = VecN::zeros(dim);
    for l in lines {
        mean += l.point * (1.0 / n);
    }
    let scale = lines
        .iter()
        .map(|l| (l.point - mean).norm())
        .fold(1.0, f64::max);
    let mut rows: Vec<VecN> = lines.iter().map(|l| (l.point - mean) * (1.0 / scale)).collect();
    rows.extend(lines.iter().map(|l| l.direction));
    let s = singular_values(&rows);
    s.get(2).cloned().unwrap_or(0.0) <= tol * (rows.len() as f64).sqrt()
}

/// Pairwise coplanarity, then parallel, planar, and concurrent tests in turn.
/// The planar test is skipped in two dimensions, where it always holds.
pub fn classify_line_family(lines: &[Line], tol: f64) -> Result<LineFamilyClass> {
    if lines.len() < 3 {
        return Err(Error::InsufficientSamples {
            found: lines.len(),
            needed: 3,
        });
    }
    let dim = lines[0].point.dim();
    if lines.iter().any(|l| l.point.dim() != dim) {
        return Err(Error::Geometry("lines of mixed dimension".into()));
    }
    let mut worst = 0.0f64;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let c = coplanar(&lines[i], &lines[j], tol);
            worst = worst.max(c.defect);
            if !c.coplanar {
                return Ok(LineFamilyClass {
                    tag: LineFamilyTag::Incoherent,
                    point: None,
                    residual: c.defect,
                    fit_residual: None,
                    witness: Some((i, j)),
                });
            }
        }
    }
    let class = |tag, point, fit_residual, witness| LineFamilyClass {
        tag,
        point,
        residual: worst,
        fit_residual,
        witness,
    };
    if all_parallel(lines, tol) {
        return Ok(class(LineFamilyTag::Parallel, None, None, None));
    }
    if dim > 2 && planar(lines, tol) {
        return Ok(class(LineFamilyTag::Planar, None, None, None));
    }
    let Some(o) = concurrency_point(lines) else {
        return Ok(class(LineFamilyTag::Parallel, None, None, None));
    };
    let (far, fit) = lines
        .iter()
        .map(|l| l.distance(&o))
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    let scale = lines.iter().map(|l| (l.point - o).norm()).fold(1.0, f64::max);
    if fit <= tol * scale {
        Ok(class(LineFamilyTag::Concurrent, Some(o), Some(fit), None))
    } else {
        let other = if far == 0 { 1 } else { 0 };
        Ok(class(LineFamilyTag::Incoherent, Some(o), Some(fit), Some((other, far))))
    }
}
