//! Distance fields: point-to-ellipsoid distance and fast-marched distance to
//! planar polylines.

use crate::error::{Error, Result};
use crate::generators::fmm::{fast_marching, FastMarching, Seeds};
use crate::grid::{GridSpec, ScalarField};
use crate::vector::VecN;

/// Signed distance from `p` to the ellipsoid `sum (x_i / e_i)^2 = 1`
/// (negative inside), by bisection on the Lagrange multiplier of the closest
/// point problem.
pub fn ellipsoid_signed_distance(axes: &[f64], p: &VecN) -> f64 {
    let n = axes.len();
    debug_assert_eq!(n, p.dim());
    let y: Vec<f64> = (0..n).map(|i| p[i].abs()).collect();
    let g: f64 = (0..n).map(|i| (y[i] / axes[i]).powi(2)).sum();
    if g == 1.0 {
        return 0.0;
    }
    let imin = (0..n).min_by(|&a, &b| axes[a].total_cmp(&axes[b])).expect("nonempty");
    let emin = axes[imin];
    let mut y = y;
    // a zero minor-axis component inside removes the pole at -emin^2; a
    // small nudge restores it at an O(1e-8) cost on the medial plane
    if g < 1.0 && y[imin] == 0.0 {
        y[imin] = emin * 1e-8;
    }
    let f = |t: f64| -> f64 { (0..n).map(|i| (axes[i] * y[i] / (t + axes[i] * axes[i])).powi(2)).sum::<f64>() - 1.0 };
    let (mut lo, mut hi) = if g > 1.0 {
        let emax = axes.iter().cloned().fold(0.0, f64::max);
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        (0.0, emax * r)
    } else {
        (-emin * emin + emin * y[imin], 0.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let d: f64 = (0..n)
        .map(|i| {
            let x = axes[i] * axes[i] * y[i] / (t + axes[i] * axes[i]);
            (y[i] - x).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    if g > 1.0 {
        d
    } else {
        -d
    }
}

/// Signed distance to an axis-aligned ellipsoid centred at `center`.
pub fn gen_ellipsoid_distance(grid: &GridSpec, center: &VecN, axes: &[f64]) -> Result<ScalarField> {
    if axes.len() != grid.dim() || center.dim() != grid.dim() || axes.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::Config("ellipsoid needs one positive semi-axis per dimension".into()));
    }
    Ok(ScalarField::from_fn(grid, |x| ellipsoid_signed_distance(axes, &(*x - *center))))
}

fn segment_distance(p: &VecN, a: &VecN, b: &VecN) -> f64 {
    let ab = *b - *a;
    let l2 = ab.norm_sq();
    let t = if l2 > 0.0 { ((*p - *a).dot(&ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (*p - (*a + ab * t)).norm()
}

/// Exact distance to the polyline at nodes within `band` of it.
pub fn polyline_band(grid: &GridSpec, curve: &[VecN], band: f64) -> Result<Vec<(usize, f64)>> {
    if grid.dim() != 2 {
        return Err(Error::Unsupported("polyline distance is two-dimensional".into()));
    }
    if curve.is_empty() || curve.iter().any(|p| p.dim() != 2 || !grid.contains(p)) {
        return Err(Error::Config("curve must be a nonempty polyline inside the grid box".into()));
    }
    let mut best = vec![f64::INFINITY; grid.len()];
    let segs: Vec<(VecN, VecN)> = if curve.len() == 1 {
        vec![(curve[0], curve[0])]
    } else {
        curve.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let (h0, h1) = (grid.spacing()[0], grid.spacing()[1]);
    let (o0, o1) = (grid.origin()[0], grid.origin()[1]);
    let (n0, n1) = (grid.shape()[0] as isize, grid.shape()[1] as isize);
    for (a, b) in &segs {
        let i0 = (((a[0].min(b[0]) - band - o0) / h0).floor() as isize).max(0);
        let i1 = (((a[0].max(b[0]) + band - o0) / h0).ceil() as isize).min(n0 - 1);
        let j0 = (((a[1].min(b[1]) - band - o1) / h1).floor() as isize).max(0);
        let j1 = (((a[1].max(b[1]) + band - o1) / h1).ceil() as isize).min(n1 - 1);
        for i in i0..=i1 {
            for j in j0..=j1 {
                let flat = grid.ravel(&[i as usize, j as usize]);
                let d = segment_distance(&grid.coord(flat), a, b);
                if d < best[flat] {
                    best[flat] = d;
                }
            }
        }
    }
    Ok(best
        .into_iter()
        .enumerate()
        .filter(|(_, d)| *d <= band)
        .collect())
}

/// Unsigned distance to a planar polyline: exact within `band` of the curve,
/// fast marching beyond.
pub fn gen_distance_field_2d(grid: &GridSpec, curve: &[VecN], band: f64) -> Result<FastMarching> {
    let seeds = polyline_band(grid, curve, band)?;
    if seeds.is_empty() {
        return Err(Error::Config("no grid node within the initialization band".into()));
    }
    fast_marching(grid, &Seeds::Values(seeds))
}

/// Closed polyline approximating a circle.
pub fn circle_polyline(center: &VecN, radius: f64, segments: usize) -> Vec<VecN> {
    (0..=segments)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / segments as f64;
            *center + VecN::from_slice(&[t.cos(), t.sin()]) * radius
        })
        .collect()
}

/// Polyline of `y = y0 + a (x - x0)^2` for `x` in `[x_lo, x_hi]`.
pub fn parabola_polyline(x0: f64, y0: f64, a: f64, x_lo: f64, x_hi: f64, segments: usize) -> Vec<VecN> {
    (0..=segments)
        .map(|k| {
            let x = x_lo + (x_hi - x_lo) * k as f64 / segments as f64;
            VecN::from_slice(&[x, y0 + a * (x - x0) * (x - x0)])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_as_ellipsoid() {
        for p in [[2.0, 0.0, 0.0], [0.3, 0.2, -0.1], [0.0, 0.5, 0.0], [1.0, 1.0, 1.0]] {
            let v = VecN::from_slice(&p);
            let d = ellipsoid_signed_distance(&[1.0, 1.0, 1.0], &v);
            assert!((d - (v.norm() - 1.0)).abs() < 1e-12, "{p:?}: {d}");
        }
    }

    #[test]
    fn ellipsoid_axis_points() {
        let e = [2.0, 1.0, 1.0];
        let d = ellipsoid_signed_distance(&e, &VecN::from_slice(&[3.0, 0.0, 0.0]));
        assert!((d - 1.0).abs() < 1e-12);
        let d = ellipsoid_signed_distance(&e, &VecN::from_slice(&[0.0, 1.5, 0.0]));
        assert!((d - 0.5).abs() < 1e-12);
        // centre: nearest points are the minor-axis ends
        let d = ellipsoid_signed_distance(&e, &VecN::zeros(3));
        assert!((d + 1.0).abs() < 1e-6);
    }
}
