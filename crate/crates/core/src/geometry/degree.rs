//! Degree of a unit field on a circle or sphere around a point.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::interp::interpolate;
use crate::vector::VecN;

#[derive(Debug, Clone, Serialize)]
pub struct DegreeReport {
    pub degree: i64,
    pub raw: f64,
    pub distance_to_integer: f64,
    pub samples: usize,
}

fn sample(u: &VectorField, p: &VecN) -> Result<VecN> {
    let v = interpolate(u, p)?;
    let n = v.norm();
    if n < 0.5 {
        return Err(Error::DegenerateContour {
            norm: n,
            point: p.to_vec(),
        });
    }
    Ok(v * (1.0 / n))
}

fn finish(raw: f64, samples: usize) -> DegreeReport {
    let degree = raw.round();
    DegreeReport {
        degree: degree as i64,
        raw,
        distance_to_integer: (raw - degree).abs(),
        samples,
    }
}

/// Icosahedron refined `levels` times, projected to the unit sphere, with
/// outward-oriented triangles.
pub fn icosphere(levels: usize) -> (Vec<VecN>, Vec<[usize; 3]>) {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut verts: Vec<VecN> = raw
        .iter()
        .map(|p| VecN::from_slice(p).normalized().expect("nonzero"))
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<VecN>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalized().expect("nonzero"));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

/// Signed solid angle of the spherical triangle `(a, b, c)` of unit vectors.
pub fn solid_angle(a: &VecN, b: &VecN, c: &VecN) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Winding number (N = 2) or degree of `u / |u|` on the sphere (N = 3).
pub fn jacobian_degree(u: &VectorField, center: &VecN, radius: f64) -> Result<DegreeReport> {
    if !(radius > 0.0) {
        return Err(Error::Config("radius must be positive".into()));
    }
    let h = u.grid.min_spacing();
    match u.dim() {
        2 => {
            let m = ((2.0 * PI * radius / (0.25 * h)).ceil() as usize).max(64);
            let mut vals = Vec::with_capacity(m);
            for j in 0..m {
                let t = 2.0 * PI * j as f64 / m as f64;
                let p = *center + VecN::from_slice(&[t.cos(), t.sin()]) * radius;
                vals.push(sample(u, &p)?);
            }
            let mut total = 0.0;
            for j in 0..m {
                let a = vals[j];
                let b = vals[(j + 1) % m];
                total += (a[0] * b[1] - a[1] * b[0]).atan2(a.dot(&b));
            }
            Ok(finish(total / (2.0 * PI), m))
        }
        3 => {
            // refine until edges are below a quarter cell
            let mut levels = 2;
            while levels < 7 && radius * 1.1 / (1usize << levels) as f64 > 0.25 * h {
                levels += 1;
            }
            let (verts, faces) = icosphere(levels);
            let vals = verts
                .iter()
                .map(|v| sample(u, &(*center + *v * radius)))
                .collect::<Result<Vec<_>>>()?;
            let total: f64 = faces
                .iter()
                .map(|&[a, b, c]| solid_angle(&vals[a], &vals[b], &vals[c]))
                .sum();
            Ok(finish(total / (4.0 * PI), verts.len()))
        }
        d => Err(Error::Unsupported(format!("degree in dimension {d}"))),
    }
}
