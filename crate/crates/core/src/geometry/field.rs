//! Constant / vortex classification of sampled unit fields.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::lines::{classify_line_family, Line, LineFamilyClass, LineFamilyTag};
use crate::grid::VectorField;
use crate::kinetic::ReductionLabel;
use crate::vector::VecN;

pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "tag")]
pub enum FieldClass {
    Constant {
        w: VecN,
    },
    Vortex {
        center: VecN,
        sign: i32,
        /// Largest distance from the center to a sampled line.
        fit_residual: f64,
    },
    Other {
        family: LineFamilyTag,
        reason: String,
        residual: f64,
        witness: Option<(usize, usize)>,
    },
}

impl FieldClass {
    pub fn label(&self) -> Option<ReductionLabel> {
        match self {
            FieldClass::Constant { w } => Some(ReductionLabel::Constant { w: *w }),
            FieldClass::Vortex { center, sign, .. } => Some(ReductionLabel::Vortex {
                center: *center,
                sign: *sign as f64,
            }),
            FieldClass::Other { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub class: FieldClass,
    pub family: LineFamilyClass,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

fn other(family: &LineFamilyClass, reason: &str) -> FieldClass {
    FieldClass::Other {
        family: family.tag,
        reason: reason.to_string(),
        residual: family.fit_residual.unwrap_or(family.residual),
        witness: family.witness,
    }
}

/// Lines through seeded sample nodes along `u(node)`, classified as a family.
pub fn classify_field(u: &VectorField, sample_count: usize, seed: u64, tol: f64) -> Result<Classification> {
    let valid = u.masked_indices();
    let wanted = sample_count.min(valid.len());
    if sample_count < MIN_SAMPLES || wanted < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: wanted,
            needed: MIN_SAMPLES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = sample(&mut rng, valid.len(), wanted).into_iter().map(|k| valid[k]).collect();
    picks.sort_unstable();
    let mut lines = Vec::with_capacity(picks.len());
    for &i in &picks {
        lines.push(Line::new(u.grid.coord(i), u.at(i))?);
    }
    let family = classify_line_family(&lines, tol)?;
    let class = match family.tag {
        LineFamilyTag::Parallel => {
            let mut m = VecN::zeros(u.dim());
            for l in &lines {
                m += l.direction;
            }
            match m.normalized() {
                Some(w) if lines.iter().all(|l| l.direction.dot(&w) > 0.0) => FieldClass::Constant { w },
                _ => other(&family, "parallel lines with inconsistent orientation"),
            }
        }
        LineFamilyTag::Concurrent => {
            let o = family.point.expect("concurrent family has a point");
            let ambiguous = tol * lines.iter().map(|l| (l.point - o).norm()).fold(1.0, f64::max);
            let (mut pos, mut neg) = (0usize, 0usize);
            for l in &lines {
                let s = l.direction.dot(&(l.point - o));
                if s > ambiguous {
                    pos += 1;
                } else if s < -ambiguous {
                    neg += 1;
                }
            }
            if pos > 0 && neg > 0 || pos + neg == 0 {
                other(&family, "mixed orientation about the concurrency point")
            } else {
                FieldClass::Vortex {
                    center: o,
                    sign: if pos > 0 { 1 } else { -1 },
                    fit_residual: family.fit_residual.unwrap_or(0.0),
                }
            }
        }
        LineFamilyTag::Planar => other(&family, "all lines lie in one 2-plane"),
        LineFamilyTag::Incoherent => other(&family, "lines are neither parallel nor concurrent"),
    };
    Ok(Classification {
        class,
        family,
        samples: lines.len(),
        seed,
        tol,
    })
}
