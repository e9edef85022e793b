//! Distributional residuals `<v . grad chi(., xi), phi> = -integral chi (v . grad phi)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};
use crate::par;
use crate::sphere::{DirectionSet, Scheme};
use crate::testfn::{Pairing, SampledTestFunction, TestFunction};
use crate::vector::{orthonormal_complement, VecN};
use crate::verdict::Verdict;

/// Multiple of the largest known-pass residual used as the tolerance.
pub const CALIBRATION_FACTOR: f64 = 3.0;
/// Tolerance floor, in units of `radius^(N-1)`.
pub const CALIBRATION_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub xi_index: usize,
    pub v_index: usize,
    pub phi_index: usize,
    pub xi: VecN,
    pub v: VecN,
    pub center: VecN,
    pub radius: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub tolerance: f64,
    pub observed_max: f64,
    pub factor: f64,
    pub floor: f64,
    pub reference_fields: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualParams {
    pub kind: String,
    pub dim: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub scheme: Scheme,
    pub direction_count: usize,
    pub tangents_per_xi: usize,
    pub phi_count: usize,
    pub phi_radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub max_abs: f64,
    pub calibration: Calibration,
    pub verdict: Verdict,
    pub params: ResidualParams,
}

impl ResidualReport {
    /// Entry with the largest `|residual|`.
    pub fn worst(&self) -> Option<&ResidualEntry> {
        self.entries
            .iter()
            .max_by(|a, b| a.residual.abs().total_cmp(&b.residual.abs()))
    }
}

/// Deterministic spanning set of `xi`-perp: the Gram-Schmidt basis, then
/// normalized sums of consecutive basis vectors if more are requested.
pub fn tangent_set(xi: &VecN, count: usize) -> Result<Vec<VecN>> {
    let dim = xi.dim();
    if count < dim - 1 {
        return Err(Error::Config(format!(
            "need at least {} tangents per direction in dimension {dim}, got {count}",
            dim - 1
        )));
    }
    let basis = orthonormal_complement(xi);
    let mut out = basis.clone();
    let m = basis.len();
    let mut i = 0;
    while out.len() < count {
        let a = basis[i % m];
        let b = basis[(i + 1) % m];
        let s = if m == 1 { a } else { (a + b) * std::f64::consts::FRAC_1_SQRT_2 };
        out.push(s);
        i += 1;
    }
    Ok(out)
}

/// Known-pass reference field used for calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceField {
    Constant(VecN),
    /// `(x - center) / |x - center|` with the center outside the grid box.
    Vortex(VecN),
}

impl ReferenceField {
    #[inline]
    pub fn eval(&self, x: &VecN) -> VecN {
        match self {
            ReferenceField::Constant(w) => *w,
            ReferenceField::Vortex(c) => {
                let d = *x - *c;
                d * (1.0 / d.norm())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ReferenceField::Constant(w) => format!("constant{:?}", w.as_slice()),
            ReferenceField::Vortex(c) => format!("vortex{:?}", c.as_slice()),
        }
    }
}

/// Constants and vortices centred just outside the box.
pub fn reference_fields(grid: &GridSpec) -> Vec<ReferenceField> {
    let dim = grid.dim();
    let mut out = Vec::new();
    for k in 0..dim {
        out.push(ReferenceField::Constant(VecN::basis(dim, k)));
    }
    let tilted = VecN::from_fn(dim, |k| [1.0, -2.0, 3.0, -4.0][k]);
    out.push(ReferenceField::Constant(tilted.normalized().expect("nonzero")));
    let c = grid.center();
    let half = (grid.upper() - grid.lower()) * 0.5;
    let placements: [[f64; 4]; 4] = [
        [1.15, 0.2, -0.1, 0.3],
        [-0.3, -1.2, 0.25, -0.2],
        [1.1, 1.1, 1.1, 1.1],
        [-1.1, 0.5, -1.1, 0.6],
    ];
    for p in placements {
        let center = VecN::from_fn(dim, |k| c[k] + p[k] * half[k]);
        out.push(ReferenceField::Vortex(center));
    }
    out
}

/// Test functions sampled once, directions and their tangents.
pub(crate) struct Prepared {
    pub sampled: Vec<SampledTestFunction>,
    pub xis: Vec<VecN>,
    pub tangents: Vec<Vec<VecN>>,
}

pub(crate) fn prepare(
    grid: &GridSpec,
    mask: &[bool],
    ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
) -> Result<Prepared> {
    if ds.dim != grid.dim() {
        return Err(Error::Config(format!(
            "direction set has dimension {}, field has {}",
            ds.dim,
            grid.dim()
        )));
    }
    if phis.is_empty() {
        return Err(Error::Config("no test functions".into()));
    }
    let sampled = phis
        .iter()
        .map(|phi| phi.sample(grid, mask))
        .collect::<Result<Vec<_>>>()?;
    let tangents = ds
        .nodes
        .iter()
        .map(|xi| tangent_set(xi, tangents_per_xi))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        sampled,
        xis: ds.nodes.clone(),
        tangents,
    })
}

/// All entries in `(xi, v, phi)` order. `dot(flat, xi)` returns `u(node) . xi`.
pub(crate) fn evaluate<D>(prep: &Prepared, dot: D) -> Vec<ResidualEntry>
where
    D: Fn(usize, &VecN) -> f64 + Sync + Send,
{
    let rows = par::map_range(prep.xis.len(), |a| {
        let xi = prep.xis[a];
        let mut out = Vec::with_capacity(prep.tangents[a].len() * prep.sampled.len());
        for (b, v) in prep.tangents[a].iter().enumerate() {
            for (c, s) in prep.sampled.iter().enumerate() {
                let r = -s.integrate(
                    |flat| if dot(flat, &xi) > 0.0 { 1.0 } else { 0.0 },
                    Pairing::GradientDot(*v),
                );
                out.push(ResidualEntry {
                    xi_index: a,
                    v_index: b,
                    phi_index: c,
                    xi,
                    v: *v,
                    center: s.phi.center,
                    radius: s.phi.radius,
                    residual: r,
                });
            }
        }
        out
    });
    rows.into_iter().flatten().collect()
}

fn max_abs(entries: &[ResidualEntry]) -> f64 {
    par::max0(entries.iter().map(|e| e.residual.abs()))
}

pub(crate) fn calibrate_prepared(grid: &GridSpec, prep: &Prepared) -> Calibration {
    let refs = reference_fields(grid);
    let mut observed = 0.0f64;
    for f in &refs {
        let entries = evaluate(prep, |flat, xi| f.eval(&grid.coord(flat)).dot(xi));
        observed = observed.max(max_abs(&entries));
    }
    let rmax = prep.sampled.iter().map(|s| s.phi.radius).fold(0.0, f64::max);
    let floor = CALIBRATION_FLOOR * rmax.powi(grid.dim() as i32 - 1);
    Calibration {
        tolerance: (CALIBRATION_FACTOR * observed).max(floor),
        observed_max: observed,
        factor: CALIBRATION_FACTOR,
        floor,
        reference_fields: refs.iter().map(|f| f.label()).collect(),
    }
}

/// Tolerance for this grid, direction set, tangent count and test family:
/// `3x` the largest residual over the reference fields, floored.
pub fn calibrate(
    grid: &GridSpec,
    ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
) -> Result<Calibration> {
    let mask = vec![true; grid.len()];
    let prep = prepare(grid, &mask, ds, tangents_per_xi, phis)?;
    Ok(calibrate_prepared(grid, &prep))
}

fn params(kind: &str, u: &VectorField, ds: &DirectionSet, t: usize, phis: &[TestFunction]) -> ResidualParams {
    ResidualParams {
        kind: kind.to_string(),
        dim: u.dim(),
        shape: u.grid.shape().to_vec(),
        spacing: u.grid.spacing().to_vec(),
        scheme: ds.scheme,
        direction_count: ds.len(),
        tangents_per_xi: t,
        phi_count: phis.len(),
        phi_radii: phis.iter().map(|p| p.radius).collect(),
    }
}

fn run(
    kind: &str,
    u: &VectorField,
    ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
    calibration: Option<&Calibration>,
) -> Result<ResidualReport> {
    let prep = prepare(&u.grid, &u.mask, ds, tangents_per_xi, phis)?;
    let dim = u.dim();
    let entries = evaluate(&prep, |flat, xi| {
        let mut d = 0.0;
        for k in 0..dim {
            d += u.components[k][flat] * xi[k];
        }
        d
    });
    let calibration = match calibration {
        Some(c) => c.clone(),
        None => calibrate_prepared(&u.grid, &prep),
    };
    let max_abs = max_abs(&entries);
    Ok(ResidualReport {
        verdict: Verdict::from_residual(max_abs, calibration.tolerance),
        entries,
        max_abs,
        calibration,
        params: params(kind, u, ds, tangents_per_xi, phis),
    })
}

/// Residuals over every `xi` in `ds`, `tangents_per_xi` tangents and every
/// test function, with a verdict against the calibrated tolerance.
pub fn kinetic_residual(
    u: &VectorField,
    ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
) -> Result<ResidualReport> {
    run("full", u, ds, tangents_per_xi, phis, None)
}

/// As [`kinetic_residual`] with a caller-supplied calibration.
pub fn kinetic_residual_calibrated(
    u: &VectorField,
    ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
    calibration: &Calibration,
) -> Result<ResidualReport> {
    run("full", u, ds, tangents_per_xi, phis, Some(calibration))
}

/// Planar case: one tangent `xi-perp` per direction.
pub fn kinetic_residual_2d(
    u: &VectorField,
    ds: &DirectionSet,
    phis: &[TestFunction],
) -> Result<ResidualReport> {
    if u.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "two-dimensional residual on a {}-dimensional field",
            u.dim()
        )));
    }
    run("2d", u, ds, 1, phis, None)
}

/// Restrict a direction set to the equator `S^{N-2} x {0}`. Accepts either an
/// (N-1)-dimensional set, which is embedded, or an N-dimensional set whose
/// nodes all have vanishing last coordinate.
pub fn equatorial(ds: &DirectionSet, dim: usize) -> Result<DirectionSet> {
    if ds.dim + 1 == dim {
        Ok(ds.embed_equator())
    } else if ds.dim == dim {
        if ds.nodes.iter().any(|x| x[dim - 1].abs() > 1e-14) {
            return Err(Error::Config("direction set is not equatorial".into()));
        }
        Ok(ds.clone())
    } else {
        Err(Error::Config(format!(
            "direction set of dimension {} cannot be equatorial in dimension {dim}",
            ds.dim
        )))
    }
}

/// Residuals over equatorial directions only (`xi_N = 0`).
pub fn weak_kinetic_residual(
    u: &VectorField,
    equator_ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
) -> Result<ResidualReport> {
    weak_inner(u, equator_ds, tangents_per_xi, phis, None)
}

pub fn weak_kinetic_residual_calibrated(
    u: &VectorField,
    equator_ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
    calibration: &Calibration,
) -> Result<ResidualReport> {
    weak_inner(u, equator_ds, tangents_per_xi, phis, Some(calibration))
}

fn weak_inner(
    u: &VectorField,
    equator_ds: &DirectionSet,
    tangents_per_xi: usize,
    phis: &[TestFunction],
    calibration: Option<&Calibration>,
) -> Result<ResidualReport> {
    if u.dim() < 3 {
        return Err(Error::Unsupported("weak formulation needs N >= 3".into()));
    }
    let ds = equatorial(equator_ds, u.dim())?;
    run("weak", u, &ds, tangents_per_xi, phis, calibration)
}
