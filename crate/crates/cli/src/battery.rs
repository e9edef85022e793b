//! A small fixed battery of generate-then-check runs, written as JSON files
//! for `report`. Negative controls record the verdict they should produce.

use std::fs;
use std::path::Path;

use anyhow::Result;
use eikinetic::vfld::write_atomic;
use eikinetic::Verdict;
use serde_json::json;

use crate::args::*;
use crate::commands::{self, Body, Outcome, ResidualMode};

fn grid(dim: usize, n: usize) -> GridArgs {
    GridArgs { dim, shape: vec![n], lo: None, hi: None }
}

fn gen(dir: &Path, name: &str, kind: Kind, g: GridArgs, center: Option<Vec<f64>>) -> Result<std::path::PathBuf> {
    let out = dir.join("fields").join(format!("{name}.vfld"));
    commands::generate(&GenerateArgs {
        kind,
        grid: g,
        center,
        sign: 1,
        w: None,
        radius: 0.5,
        axes: None,
        eps: 0.1,
        band: 0.3,
        out: out.clone(),
        plot: PlotArgs::default(),
    })?;
    Ok(out)
}

fn input(path: &Path) -> InputArgs {
    InputArgs { input: path.to_path_buf(), field: None, json: None, plot: PlotArgs::default() }
}

fn residual_args(path: &Path, xi: Option<Vec<f64>>, phi_radius: f64) -> ResidualArgs {
    ResidualArgs {
        input: input(path),
        directions: DirectionArgs { count: None, seed: 1 },
        xi,
        tangents: None,
        phi_count: 12,
        phi_radius,
    }
}

fn save(dir: &Path, name: &str, outcome: Outcome, expected: Verdict) -> Result<()> {
    let Body::Json(mut v) = outcome.body else { unreachable!("checks return JSON") };
    v["expected"] = json!(expected);
    write_atomic(dir.join(format!("{name}.json")), serde_json::to_string_pretty(&v)?.as_bytes())?;
    Ok(())
}

pub fn run(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("fields"))?;
    let vortex3 = gen(dir, "vortex3", Kind::Vortex, grid(3, 32), Some(vec![0.05, -0.02, 0.03]))?;
    save(dir, "residual_vortex3", commands::residual(&residual_args(&vortex3, None, 0.3), ResidualMode::Full)?, Verdict::Pass)?;
    let cls = ClassifyArgs { input: input(&vortex3), samples: 200, seed: 1, tol: 1e-6 };
    save(dir, "classify_vortex3", commands::classify(&cls)?, Verdict::Pass)?;

    let line = gen(dir, "vortex_line3", Kind::VortexLine, grid(3, 32), None)?;
    save(dir, "weak_vortex_line3", commands::residual(&residual_args(&line, None, 0.3), ResidualMode::Weak)?, Verdict::Pass)?;
    let xi = Some(vec![1.0, 0.0, 1.0]);
    save(dir, "residual_vortex_line3_xi", commands::residual(&residual_args(&line, xi, 0.3), ResidualMode::Full)?, Verdict::Fail)?;

    let circle = gen(dir, "circle_gradient2", Kind::CircleGradient, grid(2, 129), Some(vec![0.0, 0.0]))?;
    save(dir, "residual2d_circle", commands::residual(&residual_args(&circle, None, 0.2), ResidualMode::Planar)?, Verdict::Pass)?;
    let ent = EntropyArgs { input: input(&circle), xi: vec![0.6, 0.8], k: vec![4.0, 8.0, 16.0], phi_count: 12, phi_radius: 0.2 };
    save(dir, "entropy_circle", commands::entropy(&ent)?, Verdict::Pass)?;
    let rot = gen(dir, "rotational2", Kind::Rotational, grid(2, 129), Some(vec![0.0, 0.0]))?;
    save(dir, "residual2d_rotational", commands::residual(&residual_args(&rot, None, 0.2), ResidualMode::Planar)?, Verdict::Fail)?;

    let vortex2 = gen(dir, "vortex2", Kind::Vortex, grid(2, 65), None)?;
    let deg = DegreeArgs { input: input(&vortex2), center: None, radius: 0.5 };
    save(dir, "degree_vortex2", commands::degree(&deg)?, Verdict::Pass)?;

    let line4 = gen(dir, "vortex_line4", Kind::VortexLine, grid(4, 14), Some(vec![0.1, 1.9, 0.07]))?;
    let red = ReduceArgs { input: input(&line4), floor: 1e-6, tol: 1e-6, out: None };
    save(dir, "reduce_vortex_line4", commands::reduce(&red)?, Verdict::Pass)?;
    Ok(())
}
