//! Exceptional-point search and spectral winding charges.
//!
//! Candidate cells are those of a periodic grid on which both the real and
//! the imaginary part of the spectral discriminant change sign. Each
//! candidate is refined by a damped 2-D Newton iteration on
//! `(Re disc, Im disc)` with a central-difference Jacobian.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, Lifted, MomentumPoint};
use crate::spectral::{self, track_with, TrackOptions};

/// A refined spectral degeneracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub location: MomentumPoint,
    pub order: u32,
    /// Snapped winding charge ν; `None` when the winding loop failed.
    pub charge: Option<f64>,
    /// `|D|` (two bands) or `|Π (ε_p - ε_q)²|` (more bands) at `location`.
    pub residual: f64,
    /// Canonical indices of the two closest sheets at `location`.
    pub bands: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpSearchOptions {
    pub max_newton_iter: usize,
    /// Acceptance threshold on `|disc| / scale`.
    pub tolerance: f64,
    pub merge_distance: f64,
    /// Eigenvalue distance below which sheets count as coalesced.
    pub coalescence_radius: f64,
    /// Upper bound for the charge loop radius.
    pub winding_radius: f64,
    pub winding_samples: usize,
    pub track: TrackOptions,
}

impl Default for EpSearchOptions {
    fn default() -> Self {
        EpSearchOptions {
            max_newton_iter: 50,
            tolerance: 1e-10,
            merge_distance: 1e-6,
            coalescence_radius: 1e-6,
            winding_radius: 0.1,
            winding_samples: 256,
            track: TrackOptions::default(),
        }
    }
}

/// Result of [`locate_eps`]: the points found plus non-fatal advisories.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpCensus {
    pub eps: Vec<ExceptionalPoint>,
    pub advisories: Vec<String>,
}

impl EpCensus {
    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    /// Sum of all charges, `None` if any charge is unknown.
    pub fn total_charge(&self) -> Option<f64> {
        self.eps.iter().map(|e| e.charge).sum()
    }
}

/// Complex field whose zeros are the spectral degeneracies, with its scale.
pub(crate) fn disc_field(model: &BlochModel, k: MomentumPoint) -> (Complex64, f64) {
    if let Some(e) = model.evaluate2(k) {
        let half = (e[0][0] - e[1][1]) * 0.5;
        let d = half * half + e[0][1] * e[1][0];
        let m = e.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        (d, m * m)
    } else {
        let h = model.evaluate(k);
        let n = h.nrows() as i32;
        let m = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
        (spectral::spectral_discriminant(&h), m.powi(n * (n - 1)))
    }
}

fn field_at(model: &BlochModel, k: Lifted) -> (Complex64, f64) {
    disc_field(model, k.reduce())
}

/// Damped Newton on `(Re f, Im f)`; returns the refined point and `|f|/scale`.
pub(crate) fn newton_refine(
    model: &BlochModel,
    seed: Lifted,
    max_iter: usize,
) -> Option<(Lifted, f64)> {
    const H: f64 = 1e-6;
    let mut k = seed;
    let (mut f, mut scale) = field_at(model, k);
    for _ in 0..max_iter {
        if f.norm() <= 1e-15 * scale {
            break;
        }
        let fx = (field_at(model, Lifted::new(k.kx + H, k.ky)).0
            - field_at(model, Lifted::new(k.kx - H, k.ky)).0)
            / (2.0 * H);
        let fy = (field_at(model, Lifted::new(k.kx, k.ky + H)).0
            - field_at(model, Lifted::new(k.kx, k.ky - H)).0)
            / (2.0 * H);
        let det = fx.re * fy.im - fy.re * fx.im;
        if det.abs() <= 1e-300 || !det.is_finite() {
            return None;
        }
        let mut dx = -(fy.im * f.re - fy.re * f.im) / det;
        let mut dy = -(-fx.im * f.re + fx.re * f.im) / det;
        let len = dx.hypot(dy);
        if len > 0.5 {
            dx *= 0.5 / len;
            dy *= 0.5 / len;
        }
        let mut lam = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = Lifted::new(k.kx + lam * dx, k.ky + lam * dy);
            let (ft, st) = field_at(model, trial);
            if ft.norm() < f.norm() {
                k = trial;
                f = ft;
                scale = st;
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let r = f.norm() / scale;
    r.is_finite().then_some((k, r))
}

pub fn locate_eps(model: &BlochModel, grid: (usize, usize)) -> Result<EpCensus> {
    locate_eps_with(model, grid, &EpSearchOptions::default())
}

pub fn locate_eps_with(
    model: &BlochModel,
    grid: (usize, usize),
    opts: &EpSearchOptions,
) -> Result<EpCensus> {
    let (nx, ny) = grid;
    if nx < 16 || ny < 16 {
        return Err(Error::config(format!(
            "EP search grid must be at least 16x16, got {nx}x{ny}"
        )));
    }
    if model.bands() < 2 {
        return Ok(EpCensus::default());
    }
    let hx = TAU / nx as f64;
    let hy = TAU / ny as f64;
    let field: Vec<Complex64> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..nx).map(move |i| disc_field(model, MomentumPoint::new(i as f64 * hx, j as f64 * hy)).0)
        })
        .collect();
    let at = |i: usize, j: usize| field[(i % nx) + (j % ny) * nx];

    let mut seeds = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let straddles = |g: &dyn Fn(&Complex64) -> f64| {
                let lo = c.iter().map(g).fold(f64::INFINITY, f64::min);
                let hi = c.iter().map(g).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if straddles(&|z| z.re) && straddles(&|z| z.im) {
                seeds.push(Lifted::new((i as f64 + 0.5) * hx, (j as f64 + 0.5) * hy));
            }
        }
    }

    let refined: Vec<Option<(Lifted, f64)>> = seeds
        .par_iter()
        .map(|s| newton_refine(model, *s, opts.max_newton_iter))
        .collect();

    let mut advisories = Vec::new();
    let mut found: Vec<(MomentumPoint, f64)> = Vec::new();
    let mut discarded = 0usize;
    for r in refined {
        match r {
            Some((k, res)) if res < opts.tolerance => {
                let k = k.reduce();
                if !found.iter().any(|(p, _)| p.distance(&k) < opts.merge_distance) {
                    found.push((k, res));
                }
            }
            _ => discarded += 1,
        }
    }
    if discarded > 0 {
        advisories.push(format!(
            "{discarded} candidate cell(s) did not converge to a degeneracy and were discarded"
        ));
    }
    found.sort_by(|a, b| a.0.kx().total_cmp(&b.0.kx()).then(a.0.ky().total_cmp(&b.0.ky())));

    let cell_diag = hx.hypot(hy);
    for a in 0..found.len() {
        for b in a + 1..found.len() {
            if found[a].0.distance(&found[b].0) < cell_diag {
                advisories.push(format!(
                    "exceptional points at {} and {} share a grid cell; increase the resolution",
                    found[a].0, found[b].0
                ));
            }
        }
    }

    let mut eps: Vec<ExceptionalPoint> = found
        .iter()
        .map(|&(k, res)| {
            let (order, bands) = coalescence(model, k, opts.coalescence_radius)?;
            Ok(ExceptionalPoint {
                location: k,
                order,
                charge: None,
                residual: res,
                bands,
            })
        })
        .collect::<Result<_>>()?;

    let charges: Vec<Result<Winding>> = (0..eps.len())
        .into_par_iter()
        .map(|i| {
            let nearest = eps
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, e)| e.location.distance(&eps[i].location))
                .fold(f64::INFINITY, f64::min);
            let radius = opts.winding_radius.min(0.4 * nearest);
            winding_number_with(model, &eps[i], radius, opts.winding_samples, &[], &opts.track)
        })
        .collect();
    for (ep, w) in eps.iter_mut().zip(charges) {
        match w {
            Ok(w) => ep.charge = Some(w.value),
            Err(e) => advisories.push(format!("charge of EP at {} unavailable: {e}", ep.location)),
        }
    }
    Ok(EpCensus { eps, advisories })
}

/// Order and coalescing sheet pair of a degeneracy at `k`.
fn coalescence(model: &BlochModel, k: MomentumPoint, radius: f64) -> Result<(u32, (usize, usize))> {
    let vals = spectral::eigenvalues(model, k)?.values;
    let n = vals.len();
    let mut best = (0, 1, f64::INFINITY);
    for p in 0..n {
        for q in p + 1..n {
            let g = (vals[p] - vals[q]).norm();
            if g < best.2 {
                best = (p, q, g);
            }
        }
    }
    let (p, q, gap) = best;
    let r = radius.max(4.0 * gap);
    // single-linkage cluster grown from p
    let mut members = vec![p];
    let mut grew = true;
    while grew {
        grew = false;
        for c in 0..n {
            if !members.contains(&c) && members.iter().any(|&m| (vals[m] - vals[c]).norm() <= r) {
                members.push(c);
                grew = true;
            }
        }
    }
    Ok((members.len().max(2) as u32, (p, q)))
}

/// Raw and snapped spectral winding of one exceptional point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    /// Snapped to the nearest half-integer.
    pub value: f64,
    pub raw: f64,
}

impl Winding {
    pub fn snap_error(&self) -> f64 {
        (self.raw - self.value).abs()
    }
}

/// Spectral winding `ν = -(1/2π) ∮ d arg Δε` on a counterclockwise circle.
///
/// `neighbors` are other known degeneracies; the circle must not enclose any
/// of them.
pub fn winding_number(
    model: &BlochModel,
    ep: &ExceptionalPoint,
    radius: f64,
    samples: usize,
    neighbors: &[ExceptionalPoint],
) -> Result<Winding> {
    winding_number_with(model, ep, radius, samples, neighbors, &TrackOptions::default())
}

pub fn winding_number_with(
    model: &BlochModel,
    ep: &ExceptionalPoint,
    radius: f64,
    samples: usize,
    neighbors: &[ExceptionalPoint],
    track: &TrackOptions,
) -> Result<Winding> {
    if samples < 64 {
        return Err(Error::config(format!(
            "winding loops need at least 64 samples, got {samples}"
        )));
    }
    if radius.is_nan() || radius <= 0.0 || radius >= std::f64::consts::PI {
        return Err(Error::Geometry(format!("invalid winding radius {radius}")));
    }
    for other in neighbors {
        let d = other.location.distance(&ep.location);
        if d > 1e-9 && d <= radius {
            return Err(Error::Geometry(format!(
                "winding circle of radius {radius} around {} encloses the degeneracy at {}",
                ep.location, other.location
            )));
        }
    }
    let c = ep.location;
    let path: Vec<Lifted> = (0..=samples)
        .map(|i| {
            let th = TAU * i as f64 / samples as f64;
            Lifted::new(c.kx() + radius * th.cos(), c.ky() + radius * th.sin())
        })
        .collect();
    let mut track = track.clone();
    track.max_step = track.max_step.max(2.0 * radius * TAU / samples as f64);
    let sp = track_with(model, &path, &track)?;

    let n = sp.strands.len();
    let (p, q) = if n == 2 {
        (0, 1)
    } else {
        let v = sp.values_at(0);
        let mut best = (0, 1, f64::INFINITY);
        for a in 0..n {
            for b in a + 1..n {
                let g = (v[a] - v[b]).norm();
                if g < best.2 {
                    best = (a, b, g);
                }
            }
        }
        (best.0, best.1)
    };
    let mut phase = 0.0;
    for i in 1..sp.len() {
        let d0 = sp.strands[p][i - 1] - sp.strands[q][i - 1];
        let d1 = sp.strands[p][i] - sp.strands[q][i];
        phase += (d1 / d0).arg();
    }
    let raw = -phase / TAU;
    let value = (2.0 * raw).round() / 2.0;
    let w = Winding { value, raw };
    if w.snap_error() >= 0.05 {
        return Err(Error::Numerical {
            k: c,
            message: format!("winding {raw:.4} is not close to a half-integer"),
            residual: w.snap_error(),
        });
    }
    Ok(w)
}
