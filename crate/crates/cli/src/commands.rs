//! Subcommand bodies. Each returns an [`Outcome`]: a JSON document (or CSV
//! text) plus the verdict that decides the exit code.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eikinetic::energy::{gl_energy, regularized_vortex, EnergyBreakdown};
use eikinetic::generators::{self, Seeds};
use eikinetic::geometry::{classify_field, jacobian_degree, umbilic_check, FieldClass};
use eikinetic::kinetic::{
    curl_symmetry_check, dimensional_reduce, entropy_residual_2d, kinetic_residual, kinetic_residual_2d,
    stream_form_check, trace_on_segment, weak_kinetic_residual, ResidualReport,
};
use eikinetic::vfld::write_atomic;
use eikinetic::{DirectionSet, GridSpec, ScalarField, Scheme, TestFunction, VecN, Verdict, VectorField, Vfld};
use serde_json::{json, Value};

use crate::args::*;
use crate::svg;

pub const REPORT_VERSION: u32 = 1;

pub enum Body {
    Json(Value),
    Text(String),
}

pub struct Outcome {
    pub body: Body,
    pub verdict: Verdict,
}

impl Outcome {
    fn json(value: Value, verdict: Verdict) -> Self {
        Self { body: Body::Json(value), verdict }
    }
}

fn vec_arg(v: &[f64], dim: usize, what: &str) -> Result<VecN> {
    match v.len() {
        n if n == dim => Ok(VecN::from_slice(v)),
        1 => Ok(VecN::from_fn(dim, |_| v[0])),
        n => bail!("{what} needs {dim} values, got {n}"),
    }
}

fn unit_arg(v: &[f64], dim: usize, what: &str) -> Result<VecN> {
    if v.len() != dim {
        bail!("{what} needs {dim} values, got {}", v.len());
    }
    VecN::from_slice(v).normalized().with_context(|| format!("{what} must be nonzero"))
}

/// Box defaults: `[-1,1]^N`, except the vortex line, which lives on
/// `{x_2 > 1}` as `[-1,1] x [1.1,3.1] x [-1,1]^{N-2}`.
fn build_grid(kind: Kind, g: &GridArgs) -> Result<GridSpec> {
    let dim = g.dim;
    if !(2..=4).contains(&dim) {
        bail!("dimension must be 2, 3 or 4");
    }
    let (dlo, dhi) = match kind {
        Kind::VortexLine => (
            VecN::from_fn(dim, |k| if k == 1 { 1.1 } else { -1.0 }),
            VecN::from_fn(dim, |k| if k == 1 { 3.1 } else { 1.0 }),
        ),
        _ => (VecN::from_fn(dim, |_| -1.0), VecN::from_fn(dim, |_| 1.0)),
    };
    let lo = g.lo.as_deref().map(|v| vec_arg(v, dim, "--lo")).transpose()?.unwrap_or(dlo);
    let hi = g.hi.as_deref().map(|v| vec_arg(v, dim, "--hi")).transpose()?.unwrap_or(dhi);
    let shape: Vec<usize> = match g.shape.len() {
        1 => vec![g.shape[0]; dim],
        n if n == dim => g.shape.clone(),
        n => bail!("--shape needs 1 or {dim} values, got {n}"),
    };
    if shape.iter().any(|&n| n < 2) {
        bail!("every axis needs at least 2 nodes");
    }
    let spacing = (0..dim).map(|k| (hi[k] - lo[k]) / (shape[k] - 1) as f64).collect();
    Ok(GridSpec::new(shape, spacing, lo.to_vec())?)
}

pub fn generate(a: &GenerateArgs) -> Result<Outcome> {
    let grid = build_grid(a.kind, &a.grid)?;
    let dim = grid.dim();
    // the vortex-line axis point may omit the last coordinate
    let center = match a.center.as_deref() {
        Some(c) if a.kind == Kind::VortexLine && c.len() + 1 == dim => Some(VecN::from_slice(c).extend(0.0)),
        Some(c) => Some(vec_arg(c, dim, "--center")?),
        None => None,
    };
    let c = center.unwrap_or_else(|| match a.kind {
        Kind::VortexLine => VecN::zeros(dim),
        _ => grid.center(),
    });
    let params = json!({
        "kind": format!("{:?}", a.kind),
        "dim": dim,
        "shape": grid.shape(),
        "spacing": grid.spacing(),
        "origin": grid.origin(),
        "center": c,
        "sign": a.sign,
        "w": a.w,
        "radius": a.radius,
        "axes": a.axes,
        "eps": a.eps,
        "band": a.band,
    });
    let prov = generators::provenance(&format!("{:?}", a.kind), params.clone());
    enum Out {
        V(VectorField),
        S(ScalarField),
    }
    let out = match a.kind {
        Kind::Vortex => Out::V(generators::gen_vortex(&grid, &c, a.sign)?),
        Kind::Constant => {
            let w = a.w.as_deref().map(|w| unit_arg(w, dim, "--w")).transpose()?.unwrap_or(VecN::basis(dim, 0));
            Out::V(generators::gen_constant(&grid, &w)?)
        }
        Kind::Rotational => Out::V(generators::gen_rotational_2d(&grid, &c)?),
        Kind::VortexLine => Out::V(generators::gen_vortex_line(&grid, &c, false)?),
        Kind::CircleGradient => Out::V(generators::gen_circle_distance_gradient(&grid, &c, a.radius)?),
        Kind::RegularizedVortex => Out::V(regularized_vortex(&grid, &c, a.eps, a.radius)?),
        Kind::Distance => Out::S(generators::fast_marching(&grid, &Seeds::Points(vec![c]))?.field),
        Kind::Ellipsoid => {
            let axes = a.axes.clone().unwrap_or_else(|| {
                let mut e = vec![0.5; dim];
                e[0] = 0.8;
                e
            });
            Out::S(generators::gen_ellipsoid_distance(&grid, &c, &axes)?)
        }
        Kind::Parabola => {
            if dim != 2 {
                bail!("parabola is two-dimensional");
            }
            let (lo, hi) = (grid.lower(), grid.upper());
            let x0 = c[0];
            let y0 = c[1];
            // stay inside the box
            let reach = (hi[1] - y0).max(0.0).sqrt();
            let (xl, xr) = ((x0 - reach).max(lo[0]), (x0 + reach).min(hi[0]));
            let curve = generators::parabola_polyline(x0, y0, 1.0, xl, xr, 2000);
            Out::S(generators::gen_distance_field_2d(&grid, &curve, a.band)?.field)
        }
        Kind::Circle => {
            let curve = generators::circle_polyline(&c, a.radius, 4000);
            Out::S(generators::gen_distance_field_2d(&grid, &curve, a.band)?.field)
        }
    };
    let (vfld, summary) = match &out {
        Out::V(u) => {
            plot_vector(u, &a.plot, &format!("{:?}", a.kind))?;
            (Vfld::from_vector(u, "u"), json!({ "components": dim, "valid_nodes": u.masked_count() }))
        }
        Out::S(f) => {
            plot_scalar(f, &a.plot, &format!("{:?}", a.kind))?;
            (Vfld::from_scalar(f, "psi"), json!({ "components": 1, "valid_nodes": f.masked_count() }))
        }
    };
    vfld.with_provenance(prov).write(&a.out)?;
    Ok(Outcome::json(
        json!({ "command": "generate", "out": a.out, "params": params, "field": summary }),
        Verdict::Pass,
    ))
}

fn plot_vector(u: &VectorField, p: &PlotArgs, title: &str) -> Result<()> {
    if let Some(path) = &p.svg {
        write_atomic(path, svg::vector_svg(u, p.slice.as_deref(), title)?.as_bytes())?;
    }
    Ok(())
}

fn plot_scalar(f: &ScalarField, p: &PlotArgs, title: &str) -> Result<()> {
    if let Some(path) = &p.svg {
        write_atomic(path, svg::scalar_svg(f, p.slice.as_deref(), title)?.as_bytes())?;
    }
    Ok(())
}

fn read_vector(i: &InputArgs) -> Result<VectorField> {
    let v = Vfld::read(&i.input).with_context(|| format!("reading {}", i.input.display()))?;
    let u = v.vector_field(i.field.as_deref())?;
    plot_vector(&u, &i.plot, &i.input.display().to_string())?;
    Ok(u)
}

fn read_scalar(i: &InputArgs) -> Result<ScalarField> {
    let v = Vfld::read(&i.input).with_context(|| format!("reading {}", i.input.display()))?;
    let f = v.scalar_field(i.field.as_deref())?;
    plot_scalar(&f, &i.plot, &i.input.display().to_string())?;
    Ok(f)
}

pub fn default_count(dim: usize) -> usize {
    match dim {
        2 => 64,
        3 => 200,
        _ => 1000,
    }
}

fn direction_set(dim: usize, d: &DirectionArgs) -> Result<DirectionSet> {
    let count = d.count.unwrap_or_else(|| default_count(dim));
    Ok(DirectionSet::build(dim, count, Scheme::default_for(dim, d.seed))?)
}

fn residual_json(command: &str, input: &Path, seed: u64, r: &ResidualReport) -> Value {
    json!({
        "command": command,
        "input": input,
        "direction_seed": seed,
        "verdict": r.verdict,
        "max_abs": r.max_abs,
        "worst": r.worst(),
        "report": r,
    })
}

#[derive(Clone, Copy, PartialEq)]
pub enum ResidualMode {
    Full,
    Planar,
    Weak,
}

pub fn residual(a: &ResidualArgs, mode: ResidualMode) -> Result<Outcome> {
    let u = read_vector(&a.input)?;
    let dim = u.dim();
    let ds_dim = if mode == ResidualMode::Weak { dim - 1 } else { dim };
    let ds = match &a.xi {
        Some(xi) => {
            let xi = unit_arg(xi, dim, "--xi")?;
            DirectionSet::from_nodes(vec![xi], vec![1.0], Scheme::default_for(dim, a.directions.seed))?
        }
        None => direction_set(ds_dim, &a.directions)?,
    };
    let phis = TestFunction::halton_family(&u.grid, &u.mask, a.phi_count, a.phi_radius);
    if phis.is_empty() {
        bail!("no test function of radius {} fits inside the valid region", a.phi_radius);
    }
    let tangents = a.tangents.unwrap_or(dim - 1);
    let (name, r) = match mode {
        ResidualMode::Full => ("residual", kinetic_residual(&u, &ds, tangents, &phis)?),
        ResidualMode::Planar => ("residual2d", kinetic_residual_2d(&u, &ds, &phis)?),
        ResidualMode::Weak => ("weak", weak_kinetic_residual(&u, &ds, tangents, &phis)?),
    };
    Ok(Outcome::json(residual_json(name, &a.input.input, a.directions.seed, &r), r.verdict))
}

pub fn classify(a: &ClassifyArgs) -> Result<Outcome> {
    let u = read_vector(&a.input)?;
    let c = classify_field(&u, a.samples, a.seed, a.tol)?;
    let verdict = match c.class {
        FieldClass::Other { .. } => Verdict::Fail,
        _ => Verdict::Pass,
    };
    let mut out = serde_json::to_value(&c.class)?;
    let obj = out.as_object_mut().expect("tagged enum serializes to an object");
    obj.insert("command".into(), json!("classify"));
    obj.insert("input".into(), json!(a.input.input));
    obj.insert(
        "params".into(),
        json!({ "samples": a.samples, "seed": a.seed, "tol": a.tol, "samples_used": c.samples }),
    );
    obj.insert("family".into(), serde_json::to_value(&c.family)?);
    obj.insert("verdict".into(), json!(verdict));
    Ok(Outcome::json(out, verdict))
}

pub fn trace(a: &TraceArgs) -> Result<Outcome> {
    let u = read_vector(&a.input)?;
    let dim = u.dim();
    let (pa, pb) = (vec_arg(&a.a, dim, "--a")?, vec_arg(&a.b, dim, "--b")?);
    let h = u.grid.max_spacing();
    let radii: Vec<f64> = a.radii.clone().unwrap_or(vec![8.0, 4.0]).iter().map(|r| r * h).collect();
    let t = trace_on_segment(&u, &pa, &pb, &radii, a.tol)?;
    let reliable = t.samples.iter().filter(|s| s.reliable).count();
    let verdict = if reliable == t.samples.len() { Verdict::Pass } else { Verdict::Fail };
    Ok(Outcome::json(
        json!({
            "command": "trace",
            "input": a.input.input,
            "params": { "a": pa, "b": pb, "radii_grid_units": a.radii.clone().unwrap_or(vec![8.0, 4.0]), "tol": a.tol },
            "reliable_samples": reliable,
            "verdict": verdict,
            "trace": t,
        }),
        verdict,
    ))
}

pub fn umbilic(a: &UmbilicArgs) -> Result<Outcome> {
    let f = read_scalar(&a.input)?;
    let r = umbilic_check(&f, a.alpha, a.samples, a.tol)?;
    Ok(Outcome::json(
        json!({
            "command": "umbilic",
            "input": a.input.input,
            "params": { "alpha": a.alpha, "samples": a.samples, "tol": a.tol },
            "verdict": r.verdict,
            "report": r,
        }),
        r.verdict,
    ))
}

pub fn degree(a: &DegreeArgs) -> Result<Outcome> {
    let u = read_vector(&a.input)?;
    let dim = u.dim();
    let c = a.center.as_deref().map(|c| vec_arg(c, dim, "--center")).transpose()?.unwrap_or(u.grid.center());
    let d = jacobian_degree(&u, &c, a.radius)?;
    Ok(Outcome::json(
        json!({
            "command": "degree",
            "input": a.input.input,
            "params": { "center": c, "radius": a.radius },
            "degree": d.degree,
            "verdict": Verdict::Pass,
            "report": d,
        }),
        Verdict::Pass,
    ))
}

fn energy_csv(rows: &[EnergyBreakdown]) -> String {
    let mut s = String::from("eps,dirichlet,penalty,curl_term,total\n");
    for e in rows {
        s.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", e.eps, e.dirichlet, e.penalty, e.curl_term, e.total));
    }
    s
}

pub fn energy(a: &EnergyArgs) -> Result<Outcome> {
    if a.eps.iter().any(|e| !(*e > 0.0)) {
        bail!("every eps must be positive");
    }
    let rows: Vec<EnergyBreakdown> = match &a.input {
        Some(path) => {
            let u = Vfld::read(path)?.vector_field(a.field.as_deref())?;
            a.eps.iter().map(|&e| gl_energy(&u, e)).collect::<eikinetic::Result<_>>()?
        }
        None => {
            let g = GridSpec::cube(2, a.shape, -1.0, 1.0)?;
            a.eps
                .iter()
                .map(|&e| gl_energy(&regularized_vortex(&g, &VecN::zeros(2), e, a.disk_radius)?, e))
                .collect::<eikinetic::Result<_>>()?
        }
    };
    let csv = energy_csv(&rows);
    if let Some(out) = &a.out {
        write_atomic(out, csv.as_bytes())?;
    }
    Ok(Outcome { body: Body::Text(csv), verdict: Verdict::Pass })
}

pub fn entropy(a: &EntropyArgs) -> Result<Outcome> {
    let u = read_vector(&a.input)?;
    let xi = unit_arg(&a.xi, u.dim(), "--xi")?;
    let phis = TestFunction::halton_family(&u.grid, &u.mask, a.phi_count, a.phi_radius);
    if phis.is_empty() {
        bail!("no test function of radius {} fits inside the valid region", a.phi_radius);
    }
    let r = entropy_residual_2d(&u, &xi, &phis, &a.k)?;
    Ok(Outcome::json(
        json!({
            "command": "entropy",
            "input": a.input.input,
            "params": { "xi": xi, "k": a.k, "phi_count": phis.len(), "phi_radius": a.phi_radius },
            "verdict": r.verdict,
            "gap_decreasing": r.gap_decreasing(),
            "report": r,
        }),
        r.verdict,
    ))
}

pub fn reduce(a: &ReduceArgs) -> Result<Outcome> {
    let u = read_vector(&a.input)?;
    let sym = curl_symmetry_check(&u)?;
    let red = dimensional_reduce(&u, a.floor)?;
    if let Some(out) = &a.out {
        Vfld::from_vector(&red.field, "u_reduced").write(out)?;
    }
    let class = classify_field(&red.field, 200, 1, a.tol)?;
    let sf = stream_form_check(&u, class.class.label(), a.tol)?;
    Ok(Outcome::json(
        json!({
            "command": "reduce",
            "input": a.input.input,
            "params": { "floor": a.floor, "tol": a.tol, "classify_samples": 200, "classify_seed": 1 },
            "curl_symmetry": sym,
            "reduction": red.summary(),
            "reduced_class": class.class,
            "stream_form": sf,
            "verdict": sf.verdict,
        }),
        sf.verdict,
    ))
}

fn verdict_of(v: &Value) -> Option<Verdict> {
    v.get("verdict").and_then(|x| serde_json::from_value(x.clone()).ok())
}

/// Every `*.json` file of `dir`, sorted by name, with the verdict counts.
pub fn report(a: &ReportArgs) -> Result<Outcome> {
    if a.battery {
        crate::battery::run(&a.dir)?;
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&a.dir)
        .with_context(|| format!("reading {}", a.dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter(|p| a.out.as_ref().is_none_or(|o| o != p))
        .collect();
    files.sort();
    let (mut pass, mut fail, mut indeterminate, mut none, mut unexpected) = (0, 0, 0, 0, 0);
    let mut results = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f)?;
        let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", f.display()))?;
        if value.get("report_version").is_some() {
            continue;
        }
        let v = verdict_of(&value);
        match v {
            Some(Verdict::Pass) => pass += 1,
            Some(Verdict::Fail) => fail += 1,
            Some(Verdict::Indeterminate) => indeterminate += 1,
            None => none += 1,
        }
        // negative controls carry the verdict they are expected to produce
        let expected: Option<Verdict> = value.get("expected").and_then(|x| serde_json::from_value(x.clone()).ok());
        let as_expected = match (v, expected) {
            (Some(v), Some(e)) => v == e,
            (Some(v), None) => v == Verdict::Pass,
            (None, _) => true,
        };
        if !as_expected {
            unexpected += 1;
        }
        results.push(json!({
            "file": f.file_name().map(|n| n.to_string_lossy().into_owned()),
            "verdict": v,
            "expected": expected,
            "as_expected": as_expected,
            "result": value,
        }));
    }
    let verdict = if unexpected == 0 { Verdict::Pass } else { Verdict::Fail };
    let doc = json!({
        "report_version": REPORT_VERSION,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "directory": a.dir,
        "summary": {
            "pass": pass,
            "fail": fail,
            "indeterminate": indeterminate,
            "no_verdict": none,
            "unexpected": unexpected,
        },
        "results": results,
    });
    if let Some(out) = &a.out {
        write_atomic(out, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    }
    Ok(Outcome::json(doc, verdict))
}
