//! Entropy fluxes in 2D.
//!
//! For `xi = (cos t0, sin t0)` the sharp flux is `Phi(z) = xi-perp` where
//! `z . xi > 0` and 0 elsewhere. With the angular profile
//! `phi(t) = cos(t - t0)` on `|t - t0| < pi/2` (0 elsewhere) it decomposes as
//! `Phi(z) = -phi'(t) z + phi(t) z-perp` for `z = (cos t, sin t)`; replacing
//! `phi` by `phi_k = phi * rho_{1/k}` gives smooth fluxes `Phi_k`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};
use crate::kinetic::residual::{reference_fields, CALIBRATION_FACTOR, CALIBRATION_FLOOR};
use crate::par;
use crate::testfn::{SampledTestFunction, TestFunction};
use crate::vector::VecN;
use crate::verdict::Verdict;

/// Midpoint nodes used for the angular convolution.
const ANGULAR_NODES: usize = 512;

/// Mollified angular profile `(phi_k, phi_k')` at angle offset `s = t - t0`.
#[derive(Debug, Clone)]
pub struct AngularProfile {
    pub k: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
    // sum w cos(o), sum w sin(o)
    cos_moment: f64,
    sin_moment: f64,
}

fn wrap(s: f64) -> f64 {
    let mut s = (s + PI).rem_euclid(2.0 * PI) - PI;
    if s <= -PI {
        s += 2.0 * PI;
    }
    s
}

fn sharp(s: f64) -> (f64, f64) {
    let s = wrap(s);
    if s.abs() < FRAC_PI_2 {
        (s.cos(), -s.sin())
    } else {
        (0.0, 0.0)
    }
}

impl AngularProfile {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 1.0 / PI) {
            return Err(Error::Config(format!("smoothing index k = {k} too small")));
        }
        let eps = 1.0 / k;
        let mut offsets = Vec::with_capacity(ANGULAR_NODES);
        let mut weights = Vec::with_capacity(ANGULAR_NODES);
        for j in 0..ANGULAR_NODES {
            let s = -eps + (2.0 * j as f64 + 1.0) * eps / ANGULAR_NODES as f64;
            let q = s / eps;
            offsets.push(s);
            weights.push((-1.0 / (1.0 - q * q)).exp());
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let cos_moment = offsets.iter().zip(&weights).map(|(o, w)| w * o.cos()).sum();
        let sin_moment = offsets.iter().zip(&weights).map(|(o, w)| w * o.sin()).sum();
        Ok(Self {
            k,
            offsets,
            weights,
            cos_moment,
            sin_moment,
        })
    }

    /// `(phi_k(s), phi_k'(s))`
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let s = wrap(s);
        let eps = 1.0 / self.k;
        // away from the cut-offs the kernel sees one branch only
        if s.abs() <= FRAC_PI_2 - eps {
            let (sn, cs) = s.sin_cos();
            let (a, b) = (self.cos_moment, self.sin_moment);
            return (cs * a + sn * b, -(sn * a - cs * b));
        }
        if s.abs() >= FRAC_PI_2 + eps {
            return (0.0, 0.0);
        }
        let mut p = 0.0;
        let mut dp = 0.0;
        for (o, w) in self.offsets.iter().zip(&self.weights) {
            let (a, b) = sharp(s - o);
            p += w * a;
            dp += w * b;
        }
        (p, dp)
    }
}

/// Sharp flux `Phi^xi(z)`.
#[inline]
pub fn sharp_flux(z: &VecN, xi: &VecN) -> VecN {
    if z.dot(xi) > 0.0 {
        xi.perp()
    } else {
        VecN::zeros(2)
    }
}

/// Smoothed flux `-phi_k'(t) z + phi_k(t) z-perp` for unit `z`.
#[inline]
pub fn smooth_flux(z: &VecN, xi: &VecN, profile: &AngularProfile) -> VecN {
    let s = z[1].atan2(z[0]) - xi[1].atan2(xi[0]);
    let (p, dp) = profile.eval(s);
    *z * (-dp) + z.perp() * p
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEntry {
    pub phi_index: usize,
    pub center: VecN,
    pub radius: f64,
    pub sharp: f64,
    /// One value per smoothing index, in the order given.
    pub smoothed: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub xi: VecN,
    pub smoothing_k: Vec<f64>,
    pub entries: Vec<EntropyEntry>,
    pub max_sharp: f64,
    pub max_smoothed: Vec<f64>,
    /// `max |smoothed_k - sharp|` per smoothing index.
    pub max_gap: Vec<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl EntropyReport {
    /// Whether the gap to the sharp residual shrinks with every increase of `k`.
    pub fn gap_decreasing(&self) -> bool {
        self.max_gap.windows(2).all(|w| w[1] < w[0])
    }
}

/// `integral Phi(u) . grad phi` for one flux and one sampled test function.
fn pairing(s: &SampledTestFunction, flux: impl Fn(usize) -> VecN) -> f64 {
    let mut acc = 0.0;
    for (n, &flat) in s.nodes.iter().enumerate() {
        acc += flux(flat).dot(&s.gradients[n]);
    }
    acc * s.cell_volume
}

fn evaluate<U>(sampled: &[SampledTestFunction], xi: &VecN, profiles: &[AngularProfile], u: U) -> Vec<EntropyEntry>
where
    U: Fn(usize) -> VecN + Sync + Send,
{
    par::map_range(sampled.len(), |i| {
        let s = &sampled[i];
        let sharp = pairing(s, |f| sharp_flux(&u(f), xi));
        let smoothed = profiles
            .iter()
            .map(|p| pairing(s, |f| smooth_flux(&u(f), xi, p)))
            .collect();
        EntropyEntry {
            phi_index: i,
            center: s.phi.center,
            radius: s.phi.radius,
            sharp,
            smoothed,
        }
    })
}

fn maxima(entries: &[EntropyEntry], kcount: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let max_sharp = par::max0(entries.iter().map(|e| e.sharp.abs()));
    let max_smoothed = (0..kcount)
        .map(|j| par::max0(entries.iter().map(|e| e.smoothed[j].abs())))
        .collect();
    let max_gap = (0..kcount)
        .map(|j| par::max0(entries.iter().map(|e| (e.smoothed[j] - e.sharp).abs())))
        .collect();
    (max_sharp, max_smoothed, max_gap)
}

/// Tolerance from the reference fields, sharp and smoothed fluxes alike.
fn calibrate(grid: &GridSpec, sampled: &[SampledTestFunction], xi: &VecN, profiles: &[AngularProfile]) -> f64 {
    let mut observed = 0.0f64;
    for f in reference_fields(grid) {
        let entries = evaluate(sampled, xi, profiles, |flat| f.eval(&grid.coord(flat)));
        let (s, m, _) = maxima(&entries, profiles.len());
        observed = observed.max(s).max(m.into_iter().fold(0.0, f64::max));
    }
    let rmax = sampled.iter().map(|s| s.phi.radius).fold(0.0, f64::max);
    (CALIBRATION_FACTOR * observed).max(CALIBRATION_FLOOR * rmax)
}

/// Weak divergence residuals `<Phi(u), grad phi>` of the sharp entropy flux
/// and its smoothings `Phi_k`, one per entry of `smoothing_k`.
pub fn entropy_residual_2d(
    u: &VectorField,
    xi: &VecN,
    phis: &[TestFunction],
    smoothing_k: &[f64],
) -> Result<EntropyReport> {
    if u.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "entropy residual is two-dimensional, field has dimension {}",
            u.dim()
        )));
    }
    let xi = xi
        .normalized()
        .filter(|x| x.dim() == 2)
        .ok_or_else(|| Error::Config("xi must be a nonzero 2-vector".into()))?;
    if phis.is_empty() {
        return Err(Error::Config("no test functions".into()));
    }
    let profiles = smoothing_k
        .iter()
        .map(|&k| AngularProfile::new(k))
        .collect::<Result<Vec<_>>>()?;
    let sampled = phis
        .iter()
        .map(|p| p.sample(&u.grid, &u.mask))
        .collect::<Result<Vec<_>>>()?;
    let entries = evaluate(&sampled, &xi, &profiles, |flat| u.at(flat));
    let (max_sharp, max_smoothed, max_gap) = maxima(&entries, profiles.len());
    let tolerance = calibrate(&u.grid, &sampled, &xi, &profiles);
    let worst = max_smoothed.iter().cloned().fold(max_sharp, f64::max);
    Ok(EntropyReport {
        xi,
        smoothing_k: smoothing_k.to_vec(),
        entries,
        max_sharp,
        max_smoothed,
        max_gap,
        tolerance,
        verdict: Verdict::from_residual(worst, tolerance),
    })
}
