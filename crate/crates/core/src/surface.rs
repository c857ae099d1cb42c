//! Grid-coherent sampling of the eigenvalue sheets for mesh export.
//!
//! The first column `kx = 0` is tracked along `ky` and relabelled so that
//! branch cuts sit on real-part degeneracies. Every row is then tracked along
//! `kx` starting from its first-column values. Vertices near an exceptional
//! point or reached by a failed step are flagged. Faces touching a flagged
//! vertex or straddling a sheet seam between rows are dropped.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, Lifted};
use crate::spectral::{self, assign, track_with, TrackOptions};
use crate::topology::eps::{locate_eps_with, EpSearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshVertex {
    pub kx: f64,
    pub ky: f64,
    pub value: Complex64,
    pub flagged: bool,
}

/// One sheet on an `(nx + 1) × (ny + 1)` vertex lattice, row-major in `ky`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetMesh {
    pub sheet: usize,
    pub nx: usize,
    pub ny: usize,
    pub vertices: Vec<MeshVertex>,
    /// Quads as vertex indices, counterclockwise in the `(kx, ky)` plane.
    pub faces: Vec<[usize; 4]>,
}

impl SheetMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn vertex(&self, i: usize, j: usize) -> &MeshVertex {
        &self.vertices[self.index(i, j)]
    }

    pub fn flagged_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.flagged).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceOptions {
    pub track: TrackOptions,
    /// Vertices within this many cell diagonals of an EP are flagged.
    pub ep_flag_cells: f64,
    pub eps: EpSearchOptions,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        SurfaceOptions {
            track: TrackOptions::default(),
            ep_flag_cells: 1.0,
            eps: EpSearchOptions::default(),
        }
    }
}

pub fn sample_surface(model: &BlochModel, grid: (usize, usize)) -> Result<Vec<SheetMesh>> {
    sample_surface_with(model, grid, &SurfaceOptions::default())
}

/// Tracks `from` (values in sheet order at `a`) to `b`, subdividing so that no
/// step exceeds the tracker's limit. Returns the values at `b` in sheet order.
fn advance(model: &BlochModel, a: Lifted, from: &[Complex64], b: Lifted, opts: &TrackOptions) -> Result<Vec<Complex64>> {
    let steps = (a.distance(&b) / (0.8 * opts.max_step)).ceil().max(1.0) as usize;
    let path: Vec<Lifted> = (0..=steps).map(|s| a.lerp(&b, s as f64 / steps as f64)).collect();
    let tracked = track_with(model, &path, opts)?;
    let (sigma, _) = assign(from, &tracked.values_at(0));
    let last = tracked.len() - 1;
    Ok(sigma.iter().map(|&s| tracked.strands[s][last]).collect())
}

/// Values along a line of vertices, with a flag for each vertex reached
/// through a failed step.
fn track_line(
    model: &BlochModel,
    points: &[Lifted],
    start: Vec<Complex64>,
    opts: &TrackOptions,
) -> Result<Vec<(Vec<Complex64>, bool)>> {
    let mut out = vec![(start, false)];
    for w in points.windows(2) {
        let prev = &out[out.len() - 1].0;
        match advance(model, w[0], prev, w[1], opts) {
            Ok(v) => out.push((v, false)),
            Err(Error::Tracking { .. } | Error::Degeneracy { .. }) => {
                let raw = spectral::eigenvalues(model, w[1].reduce())?.values;
                let (sigma, _) = assign(prev, &raw);
                out.push((sigma.iter().map(|&s| raw[s]).collect(), true));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Relabels the first column so that sheets are ordered by real part wherever
/// the real parts are clearly separated. Branch cuts then fall on real-part
/// degeneracies crossing the column; tied stretches keep the tracked labels.
fn cuts_on_real_degeneracies(line: Vec<(Vec<Complex64>, bool)>) -> Vec<(Vec<Complex64>, bool)> {
    let mut order: Vec<usize> = (0..line.first().map_or(0, |l| l.0.len())).collect();
    line.into_iter()
        .map(|(values, flag)| {
            let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let mut by_re: Vec<usize> = (0..values.len()).collect();
            by_re.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
            if by_re.windows(2).all(|w| values[w[1]].re - values[w[0]].re > 1e-8 * scale) {
                order = by_re;
            }
            (order.iter().map(|&s| values[s]).collect(), flag)
        })
        .collect()
}

pub fn sample_surface_with(model: &BlochModel, grid: (usize, usize), opts: &SurfaceOptions) -> Result<Vec<SheetMesh>> {
    let (nx, ny) = grid;
    if nx < 16 || ny < 16 {
        return Err(Error::config(format!("surface grid must be at least 16x16, got {nx}x{ny}")));
    }
    let n = model.bands();
    let hx = TAU / nx as f64;
    let hy = TAU / ny as f64;

    let column: Vec<Lifted> = (0..=ny).map(|j| Lifted::new(0.0, j as f64 * hy)).collect();
    let start = spectral::eigenvalues(model, column[0].reduce())?.values;
    let first = cuts_on_real_degeneracies(track_line(model, &column, start, &opts.track)?);

    let rows: Vec<Vec<(Vec<Complex64>, bool)>> = (0..=ny)
        .into_par_iter()
        .map(|j| {
            let points: Vec<Lifted> = (0..=nx).map(|i| Lifted::new(i as f64 * hx, j as f64 * hy)).collect();
            let mut row = track_line(model, &points, first[j].0.clone(), &opts.track)?;
            row[0].1 |= first[j].1;
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let eps = locate_eps_with(model, grid, &opts.eps)?.eps;
    let radius = opts.ep_flag_cells * hx.hypot(hy);
    let near_ep = |p: Lifted| eps.iter().any(|e| e.location.distance(&p.reduce()) <= radius);

    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut flags = vec![false; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            flags[idx(i, j)] = rows[j][i].1 || near_ep(Lifted::new(i as f64 * hx, j as f64 * hy));
        }
    }

    // vertical edges whose sheet labels disagree with nearest matching
    let mut seam = vec![vec![false; n]; (nx + 1) * ny];
    for j in 0..ny {
        for i in 0..=nx {
            let (sigma, _) = assign(&rows[j][i].0, &rows[j + 1][i].0);
            for s in 0..n {
                seam[j * (nx + 1) + i][s] = sigma[s] != s;
            }
        }
    }

    let meshes = (0..n)
        .map(|s| {
            let vertices: Vec<MeshVertex> = (0..=ny)
                .flat_map(|j| (0..=nx).map(move |i| (i, j)))
                .map(|(i, j)| MeshVertex {
                    kx: i as f64 * hx,
                    ky: j as f64 * hy,
                    value: rows[j][i].0[s],
                    flagged: flags[idx(i, j)],
                })
                .collect();
            let mut faces = Vec::new();
            for j in 0..ny {
                for i in 0..nx {
                    let quad = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
                    let flagged = quad.iter().any(|&v| flags[v]);
                    let cut = seam[j * (nx + 1) + i][s] || seam[j * (nx + 1) + i + 1][s];
                    if !flagged && !cut {
                        faces.push(quad);
                    }
                }
            }
            SheetMesh {
                sheet: s,
                nx,
                ny,
                vertices,
                faces,
            }
        })
        .collect();
    Ok(meshes)
}
