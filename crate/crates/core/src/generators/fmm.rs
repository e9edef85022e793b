//! First-order fast marching for `|grad psi| = 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::vector::VecN;

#[derive(Debug, Clone)]
pub enum Seeds {
    /// Nodes within `h/2` (per axis) of any point get value 0.
    Points(Vec<VecN>),
    /// Explicit nodes with value 0.
    Nodes(Vec<usize>),
    /// Nodes next to a sign change of the field (the side with the smaller
    /// magnitude), or exactly zero, get value 0.
    ZeroSet(ScalarField),
    /// Explicit nodes with given initial values.
    Values(Vec<(usize, f64)>),
}

#[derive(Debug, Clone)]
pub struct FastMarching {
    pub field: ScalarField,
    /// Flat indices in acceptance order, seeds first.
    pub order: Vec<usize>,
    pub seeds: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Far,
    Trial,
    Accepted,
}

#[derive(Clone, Copy)]
struct Item {
    value: f64,
    flat: usize,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    // reversed: BinaryHeap pops the smallest value, then the smallest index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.flat.cmp(&self.flat))
    }
}

fn rasterize(grid: &GridSpec, mask: &[bool], seeds: &Seeds) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    match seeds {
        Seeds::Points(points) => {
            let dim = grid.dim();
            for p in points {
                if p.dim() != dim || !grid.contains(p) {
                    return Err(Error::Config(format!("seed {:?} lies outside the grid", p.as_slice())));
                }
                // nodes at most h/2 away along every axis
                let mut lo = [0usize; 4];
                let mut hi = [0usize; 4];
                for k in 0..dim {
                    let s = (p[k] - grid.origin()[k]) / grid.spacing()[k];
                    lo[k] = (s - 0.5).ceil().max(0.0) as usize;
                    hi[k] = ((s + 0.5).floor() as usize).min(grid.shape()[k] - 1);
                }
                let mut idx = lo;
                'odo: loop {
                    out.push((grid.ravel(&idx[..dim]), 0.0));
                    let mut k = dim;
                    loop {
                        if k == 0 {
                            break 'odo;
                        }
                        k -= 1;
                        if idx[k] < hi[k] {
                            idx[k] += 1;
                            break;
                        }
                        idx[k] = lo[k];
                    }
                }
            }
        }
        Seeds::Nodes(nodes) => {
            for &i in nodes {
                if i >= grid.len() {
                    return Err(Error::Config(format!("seed node {i} out of range")));
                }
                out.push((i, 0.0));
            }
        }
        Seeds::ZeroSet(f) => {
            if f.grid != *grid {
                return Err(Error::Config("zero-set field lives on a different grid".into()));
            }
            for i in grid.indices().filter(|&i| f.mask[i]) {
                let fi = f.values[i];
                let on = fi == 0.0
                    || (0..grid.dim()).any(|k| {
                        [-1isize, 1].iter().any(|&d| {
                            grid.neighbor(i, k, d).is_some_and(|j| {
                                f.mask[j] && f.values[j] * fi < 0.0 && fi.abs() <= f.values[j].abs()
                            })
                        })
                    });
                if on {
                    out.push((i, 0.0));
                }
            }
        }
        Seeds::Values(v) => {
            for &(i, val) in v {
                if i >= grid.len() || !(val.is_finite() && val >= 0.0) {
                    return Err(Error::Config(format!("bad seed ({i}, {val})")));
                }
                out.push((i, val));
            }
        }
    }
    out.retain(|&(i, _)| mask[i]);
    out.sort_by_key(|&(i, _)| i);
    out.dedup_by_key(|&mut (i, _)| i);
    if out.is_empty() {
        return Err(Error::Config("no seed node inside the domain".into()));
    }
    Ok(out)
}

/// Godunov upwind update at `i` from accepted neighbours.
fn update(grid: &GridSpec, values: &[f64], state: &[State], i: usize) -> f64 {
    let dim = grid.dim();
    let mut a = [(0.0f64, 0.0f64); 4];
    let mut m = 0;
    for k in 0..dim {
        let mut best = f64::INFINITY;
        for d in [-1isize, 1] {
            if let Some(j) = grid.neighbor(i, k, d) {
                if state[j] == State::Accepted && values[j] < best {
                    best = values[j];
                }
            }
        }
        if best.is_finite() {
            a[m] = (best, grid.spacing()[k]);
            m += 1;
        }
    }
    godunov(&mut a[..m])
}

/// Largest root of `sum ((psi - a_k)^+ / h_k)^2 = 1`.
fn godunov(a: &mut [(f64, f64)]) -> f64 {
    a.sort_by(|x, y| x.0.total_cmp(&y.0));
    let Some(&(base, _)) = a.first() else {
        return f64::INFINITY;
    };
    let mut result = f64::INFINITY;
    // quadratic in psi - base over the m smallest neighbours; the shift keeps
    // the discriminant free of cancellation
    let (mut sa, mut sb, mut sc) = (0.0, 0.0, -1.0);
    for (m, &(v, h)) in a.iter().enumerate() {
        let v = v - base;
        let w = 1.0 / (h * h);
        sa += w;
        sb += -2.0 * v * w;
        sc += v * v * w;
        let disc = sb * sb - 4.0 * sa * sc;
        if disc < 0.0 {
            break;
        }
        let psi = (-sb + disc.sqrt()) / (2.0 * sa);
        if psi < v {
            break;
        }
        result = base + psi;
        if m + 1 < a.len() && psi <= a[m + 1].0 - base {
            break;
        }
    }
    result
}

/// Fast marching over the whole grid.
pub fn fast_marching(grid: &GridSpec, seeds: &Seeds) -> Result<FastMarching> {
    fast_marching_masked(grid, &vec![true; grid.len()], seeds)
}

/// Fast marching restricted to `domain`; unreachable nodes are left at
/// `+inf` and masked out.
pub fn fast_marching_masked(grid: &GridSpec, domain: &[bool], seeds: &Seeds) -> Result<FastMarching> {
    if domain.len() != grid.len() {
        return Err(Error::InvalidField("domain mask length differs from grid".into()));
    }
    let init = rasterize(grid, domain, seeds)?;
    let n = grid.len();
    let mut values = vec![f64::INFINITY; n];
    let mut state = vec![State::Far; n];
    let mut heap = BinaryHeap::new();
    for &(i, v) in &init {
        values[i] = v;
        state[i] = State::Trial;
        heap.push(Item { value: v, flat: i });
    }
    let mut order = Vec::with_capacity(n);
    while let Some(Item { value, flat }) = heap.pop() {
        if state[flat] == State::Accepted || value > values[flat] {
            continue;
        }
        state[flat] = State::Accepted;
        order.push(flat);
        for k in 0..grid.dim() {
            for d in [-1isize, 1] {
                let Some(j) = grid.neighbor(flat, k, d) else { continue };
                if !domain[j] || state[j] == State::Accepted {
                    continue;
                }
                let v = update(grid, &values, &state, j);
                if v < values[j] {
                    values[j] = v;
                    state[j] = State::Trial;
                    heap.push(Item { value: v, flat: j });
                }
            }
        }
    }
    let mask: Vec<bool> = values.iter().map(|v| v.is_finite()).collect();
    Ok(FastMarching {
        field: ScalarField::with_mask(grid.clone(), values, mask)?,
        order,
        seeds: init.into_iter().map(|(i, _)| i).collect(),
    })
}

impl FastMarching {
    /// Largest `|sum ((psi - a_k)^+ / h_k)^2 - 1|` over accepted non-seed
    /// nodes, with `a_k` the smaller neighbour value along each axis.
    pub fn godunov_residual(&self) -> f64 {
        let f = &self.field;
        let grid = &f.grid;
        let mut is_seed = vec![false; grid.len()];
        for &s in &self.seeds {
            is_seed[s] = true;
        }
        let rows = crate::par::map_range(grid.len(), |i| {
            if !f.mask[i] || is_seed[i] {
                return 0.0;
            }
            let psi = f.values[i];
            let mut s = 0.0;
            for k in 0..grid.dim() {
                let mut best = f64::INFINITY;
                for d in [-1isize, 1] {
                    if let Some(j) = grid.neighbor(i, k, d) {
                        if f.mask[j] {
                            best = best.min(f.values[j]);
                        }
                    }
                }
                if best < psi {
                    s += ((psi - best) / grid.spacing()[k]).powi(2);
                }
            }
            (s - 1.0).abs()
        });
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Whether accepted values never decrease along the acceptance order.
    pub fn is_monotone(&self) -> bool {
        self.order
            .windows(2)
            .all(|w| self.field.values[w[0]] <= self.field.values[w[1]])
    }
}
