//! Analytic unit fields with masks around their singular sets.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};
use crate::vector::VecN;

/// Masked radius around point singularities, in units of the largest spacing.
pub const SINGULAR_MARGIN: f64 = 3.0;

fn check_point(grid: &GridSpec, p: &VecN, what: &str) -> Result<()> {
    if p.dim() != grid.dim() || !p.is_finite() {
        return Err(Error::Config(format!("{what} must be a finite {}-vector", grid.dim())));
    }
    Ok(())
}

/// `sign (x - center) / |x - center|`, masked within `3 max(h)` of the center.
pub fn gen_vortex(grid: &GridSpec, center: &VecN, sign: i32) -> Result<VectorField> {
    check_point(grid, center, "center")?;
    if sign != 1 && sign != -1 {
        return Err(Error::Config(format!("sign must be +1 or -1, got {sign}")));
    }
    let r0 = SINGULAR_MARGIN * grid.max_spacing();
    let s = sign as f64;
    Ok(VectorField::from_fn(grid, |x| {
        let d = *x - *center;
        let r = d.norm();
        (r >= r0).then(|| d * (s / r))
    }))
}

/// `u = w` everywhere.
pub fn gen_constant(grid: &GridSpec, w: &VecN) -> Result<VectorField> {
    check_point(grid, w, "w")?;
    if (w.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!("w must be a unit vector, |w| = {}", w.norm())));
    }
    Ok(VectorField::from_fn(grid, |_| Some(*w)))
}

/// `(x - c)-perp / |x - c|` in 2D: unit norm, divergence free, not curl free.
pub fn gen_rotational_2d(grid: &GridSpec, center: &VecN) -> Result<VectorField> {
    if grid.dim() != 2 {
        return Err(Error::Unsupported("rotational field is two-dimensional".into()));
    }
    check_point(grid, center, "center")?;
    let r0 = SINGULAR_MARGIN * grid.max_spacing();
    Ok(VectorField::from_fn(grid, |x| {
        let d = *x - *center;
        let r = d.norm();
        (r >= r0).then(|| d.perp() * (1.0 / r))
    }))
}

/// `u = (x' - a', 0) / |x' - a'|` with the axis `{x' = a'}` along `e_N`,
/// masked within `3 max(h)` of the axis. With `upper_half` only `x_2 > 1`
/// is kept.
pub fn gen_vortex_line(grid: &GridSpec, axis_point: &VecN, upper_half: bool) -> Result<VectorField> {
    let dim = grid.dim();
    if dim < 3 {
        return Err(Error::Unsupported("vortex line needs N >= 3".into()));
    }
    let a = match axis_point.dim() {
        d if d == dim => axis_point.head(),
        d if d == dim - 1 => *axis_point,
        _ => return Err(Error::Config("axis point has the wrong dimension".into())),
    };
    let r0 = SINGULAR_MARGIN * grid.max_spacing();
    Ok(VectorField::from_fn(grid, |x| {
        if upper_half && x[1] <= 1.0 {
            return None;
        }
        let d = x.head() - a;
        let r = d.norm();
        (r >= r0).then(|| (d * (1.0 / r)).extend(0.0))
    }))
}

/// `sign(|x - c| - R) (x - c) / |x - c|`: the gradient of the distance to
/// the circle (or sphere) of radius `R`. Masked within `3 max(h)` of the
/// circle and of the center.
pub fn gen_circle_distance_gradient(grid: &GridSpec, center: &VecN, radius: f64) -> Result<VectorField> {
    check_point(grid, center, "center")?;
    if !(radius > 0.0) {
        return Err(Error::Config("radius must be positive".into()));
    }
    let r0 = SINGULAR_MARGIN * grid.max_spacing();
    Ok(VectorField::from_fn(grid, |x| {
        let d = *x - *center;
        let r = d.norm();
        let s = r - radius;
        (r >= r0 && s.abs() >= r0).then(|| d * (s.signum() / r))
    }))
}

/// Provenance record for generator output.
pub fn provenance(kind: &str, params: Value) -> Value {
    json!({ "generator": kind, "params": params, "crate_version": env!("CARGO_PKG_VERSION") })
}
