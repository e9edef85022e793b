//! Static SVG plots: heatmap for scalars, angle heatmap plus quiver for
//! vector fields. Three- and four-dimensional inputs are sliced first.

use std::fmt::Write;

use anyhow::{bail, Context, Result};
use eikinetic::{GridSpec, ScalarField, VectorField};

const CELLS: usize = 128;
const ARROWS: usize = 24;
const SIZE: f64 = 512.0;

/// A 2D view: values on an `n0 x n1` lattice with per-node validity.
struct Plane {
    n0: usize,
    n1: usize,
    /// One entry per component kept for display.
    channels: Vec<Vec<f64>>,
    mask: Vec<bool>,
    axes: (usize, usize),
}

/// Parse `axis=value[,axis=value]`.
fn parse_slice(spec: &str) -> Result<Vec<(usize, f64)>> {
    spec.split(',')
        .map(|part| {
            let (a, v) = part.split_once('=').context("slice must look like axis=value")?;
            Ok((a.trim().parse()?, v.trim().parse()?))
        })
        .collect()
}

fn plane_of(grid: &GridSpec, arrays: &[&[f64]], mask: &[bool], slice: Option<&str>) -> Result<Plane> {
    let dim = grid.dim();
    let fixed = match (dim, slice) {
        (2, _) => Vec::new(),
        (_, Some(s)) => parse_slice(s)?,
        (_, None) => bail!("plots of {dim}-dimensional fields need --slice axis=value"),
    };
    let mut idx = [0usize; 4];
    for &(axis, value) in &fixed {
        if axis >= dim {
            bail!("slice axis {axis} out of range");
        }
        let s = ((value - grid.origin()[axis]) / grid.spacing()[axis]).round();
        if s < 0.0 || s as usize >= grid.shape()[axis] {
            bail!("slice {axis}={value} lies outside the grid");
        }
        idx[axis] = s as usize;
    }
    let free: Vec<usize> = (0..dim).filter(|k| !fixed.iter().any(|(a, _)| a == k)).collect();
    if free.len() != 2 {
        bail!("slices must leave exactly two free axes, {} left", free.len());
    }
    let (a0, a1) = (free[0], free[1]);
    let (n0, n1) = (grid.shape()[a0], grid.shape()[a1]);
    let mut channels = vec![Vec::with_capacity(n0 * n1); arrays.len()];
    let mut m = Vec::with_capacity(n0 * n1);
    for i in 0..n0 {
        for j in 0..n1 {
            idx[a0] = i;
            idx[a1] = j;
            let flat = grid.ravel(&idx[..dim]);
            for (c, a) in arrays.iter().enumerate() {
                channels[c].push(a[flat]);
            }
            m.push(mask[flat]);
        }
    }
    Ok(Plane { n0, n1, channels, mask: m, axes: (a0, a1) })
}

fn diverging(t: f64) -> (u8, u8, u8) {
    // blue -> white -> red on t in [0, 1]
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (s, s, 1.0)
    } else {
        let s = (1.0 - t) / 0.5;
        (1.0, s, s)
    };
    ((r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
}

fn hue(angle: f64) -> (u8, u8, u8) {
    let h = (angle / std::f64::consts::TAU).rem_euclid(1.0) * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as usize {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let mix = |c: f64| (255.0 * (0.35 + 0.65 * c)) as u8;
    (mix(r), mix(g), mix(b))
}

fn render(p: &Plane, title: &str) -> String {
    let scalar = p.channels.len() == 1;
    let (lo, hi) = if scalar {
        p.channels[0]
            .iter()
            .zip(&p.mask)
            .filter(|(v, m)| **m && v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (v, _)| (a.min(*v), b.max(*v)))
    } else {
        (0.0, 1.0)
    };
    let step0 = p.n0.div_ceil(CELLS).max(1);
    let step1 = p.n1.div_ceil(CELLS).max(1);
    let (c0, c1) = (p.n0.div_ceil(step0), p.n1.div_ceil(step1));
    let (w, h) = (SIZE / c0 as f64, SIZE / c1 as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
        SIZE,
        SIZE + 24.0
    );
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="14" font-family="monospace">{}</text>"#, SIZE + 18.0, title);
    let at = |i: usize, j: usize| i * p.n1 + j;
    for a in 0..c0 {
        for b in 0..c1 {
            let k = at(a * step0, b * step1);
            let (r, g, bl) = if !p.mask[k] {
                (160, 160, 160)
            } else if scalar {
                let v = p.channels[0][k];
                if hi > lo { diverging((v - lo) / (hi - lo)) } else { diverging(0.5) }
            } else {
                hue(p.channels[1][k].atan2(p.channels[0][k]))
            };
            // axis 0 runs left to right, axis 1 bottom to top
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{bl})"/>"#,
                a as f64 * w,
                SIZE - (b + 1) as f64 * h,
                w + 0.05,
                h + 0.05
            );
        }
    }
    if !scalar {
        let q0 = p.n0.div_ceil(ARROWS).max(1);
        let q1 = p.n1.div_ceil(ARROWS).max(1);
        let len = 0.4 * SIZE / ARROWS as f64;
        for i in (q0 / 2..p.n0).step_by(q0) {
            for j in (q1 / 2..p.n1).step_by(q1) {
                let k = at(i, j);
                if !p.mask[k] {
                    continue;
                }
                let x = (i as f64 + 0.5) * SIZE / p.n0 as f64;
                let y = SIZE - (j as f64 + 0.5) * SIZE / p.n1 as f64;
                let (u, v) = (p.channels[0][k], p.channels[1][k]);
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.2"/><circle cx="{:.2}" cy="{:.2}" r="1.6"/>"#,
                    x - u * len,
                    y + v * len,
                    x + u * len,
                    y - v * len,
                    x + u * len,
                    y - v * len
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn vector_svg(u: &VectorField, slice: Option<&str>, title: &str) -> Result<String> {
    let arrays: Vec<&[f64]> = u.components.iter().map(|c| c.as_slice()).collect();
    let mut p = plane_of(&u.grid, &arrays, &u.mask, slice)?;
    let (a0, a1) = p.axes;
    p.channels = vec![p.channels[a0].clone(), p.channels[a1].clone()];
    Ok(render(&p, title))
}

pub fn scalar_svg(f: &ScalarField, slice: Option<&str>, title: &str) -> Result<String> {
    let mask: Vec<bool> = f.mask.iter().zip(&f.values).map(|(m, v)| *m && v.is_finite()).collect();
    let p = plane_of(&f.grid, &[&f.values], &mask, slice)?;
    Ok(render(&p, title))
}

#[cfg(test)]
mod tests {
    use super::*;
    use eikinetic::VecN;

    #[test]
    fn slices_need_two_free_axes() {
        let g = GridSpec::cube(3, 5, -1.0, 1.0).unwrap();
        let u = VectorField::from_fn(&g, |_| Some(VecN::basis(3, 0)));
        assert!(vector_svg(&u, None, "u").is_err());
        assert!(vector_svg(&u, Some("0=0,1=0"), "u").is_err());
        assert!(vector_svg(&u, Some("2=3.0"), "u").is_err());
        let s = vector_svg(&u, Some("2=0.0"), "u").unwrap();
        assert!(s.starts_with("<svg") && s.contains("<line"));
    }
}
