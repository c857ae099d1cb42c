//! Real- and imaginary-part degeneracy contours as polylines on the torus.
//!
//! For a sheet pair `(p, q)` let `g = (ε_p - ε_q)²` (for two bands
//! `g = 4D`). Real-part degeneracies are the part of the zero set of `Im g`
//! where `Re g ≤ 0`; imaginary-part degeneracies are the part where
//! `Re g ≥ 0`. The zero set of `Im g` is extracted by marching squares on a
//! periodic grid, with crossings refined along grid edges. Segments whose
//! endpoints disagree on the sign of `Re g` are split at an exceptional point.
//!
//! With more than two bands the sheet labels are fixed per cell by matching
//! the corner spectra to the first corner; crossing points are keyed by the
//! sheet pair in the labelling of the edge's start node so that neighbouring
//! cells chain consistently.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, Lifted, MomentumPoint};
use crate::spectral::{self, assign, Axis};
use crate::topology::eps::{locate_eps_with, EpSearchOptions, ExceptionalPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourKind {
    /// `Re ε_p = Re ε_q`: Fermi arcs and cuts.
    Real,
    /// `Im ε_p = Im ε_q`.
    Imaginary,
}

impl ContourKind {
    pub fn name(self) -> &'static str {
        match self {
            ContourKind::Real => "real",
            ContourKind::Imaginary => "imaginary",
        }
    }
}

impl std::str::FromStr for ContourKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(ContourKind::Real),
            "imaginary" | "imag" => Ok(ContourKind::Imaginary),
            other => Err(Error::config(format!("unknown contour kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyContour {
    pub kind: ContourKind,
    /// Vertices in lifted coordinates; closed contours repeat the first vertex
    /// (shifted by the winding) at the end.
    pub polyline: Vec<Lifted>,
    pub closed: bool,
    pub contractible: bool,
    /// Windings `(wx, wy)` around the two torus cycles, oriented so that the
    /// first non-zero entry is positive.
    pub homotopy_class: (i32, i32),
    pub bands: (usize, usize),
    pub start_ep: Option<ExceptionalPoint>,
    pub end_ep: Option<ExceptionalPoint>,
    /// An open end that could not be attached to an exceptional point.
    pub flagged: bool,
}

impl DegeneracyContour {
    /// Transversal crossings with the loop along `axis` at transverse `offset`.
    pub fn crossings(&self, axis: Axis, offset: f64) -> usize {
        let coord = |p: &Lifted| match axis {
            Axis::X => p.ky - offset,
            Axis::Y => p.kx - offset,
        };
        self.polyline
            .windows(2)
            .map(|w| {
                let a = (coord(&w[0]) / TAU).floor() as i64;
                let b = (coord(&w[1]) / TAU).floor() as i64;
                (a - b).unsigned_abs() as usize
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourOptions {
    /// Open ends are attached to exceptional points within this many grid-cell
    /// diagonals.
    pub ep_match_cells: f64,
    pub eps: EpSearchOptions,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            ep_match_cells: 2.0,
            eps: EpSearchOptions::default(),
        }
    }
}

pub fn degeneracy_contours(
    model: &BlochModel,
    kind: ContourKind,
    grid: (usize, usize),
) -> Result<Vec<DegeneracyContour>> {
    degeneracy_contours_with(model, kind, grid, &ContourOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum PointId {
    Node { node: usize, pair: (usize, usize) },
    /// `edge = 2·start_node + (0 horizontal | 1 vertical)`; pair in start-node labels.
    Edge { edge: usize, pair: (usize, usize) },
    Split { seg: usize },
}

#[derive(Debug, Clone, Copy)]
struct PointSpec {
    id: PointId,
    from: Lifted,
    to: Lifted,
    start_node: usize,
    pair: (usize, usize),
    f_from: f64,
    f_to: f64,
}

#[derive(Debug, Clone, Copy)]
struct PointInfo {
    pos: MomentumPoint,
    g: Complex64,
}

struct Grid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid {
    fn node(&self, i: usize, j: usize) -> usize {
        (i % self.nx) + (j % self.ny) * self.nx
    }

    fn pos(&self, i: usize, j: usize) -> Lifted {
        Lifted::new(i as f64 * self.hx, j as f64 * self.hy)
    }
}

struct Field<'a> {
    model: &'a BlochModel,
    two_band: bool,
    /// Per node: `4D` (two bands) or the canonical spectrum.
    quad: Vec<Complex64>,
    eig: Vec<Vec<Complex64>>,
}

fn pair_value(vals: &[Complex64], p: usize, q: usize) -> Complex64 {
    let d = vals[p] - vals[q];
    d * d
}

fn sorted(p: usize, q: usize) -> (usize, usize) {
    if p < q {
        (p, q)
    } else {
        (q, p)
    }
}

impl Field<'_> {
    fn four_d(&self, k: MomentumPoint) -> Complex64 {
        let e = self.model.evaluate2(k).expect("two-band model");
        let half = (e[0][0] - e[1][1]) * 0.5;
        (half * half + e[0][1] * e[1][0]) * 4.0
    }

    /// `g` for the pair `(p, q)` labelled by the spectrum `reference`.
    fn value(&self, k: MomentumPoint, reference: Option<&[Complex64]>, pair: (usize, usize)) -> Result<Complex64> {
        if self.two_band {
            return Ok(self.four_d(k));
        }
        let vals = spectral::eigenvalues(self.model, k)?.values;
        let reference = reference.expect("reference spectrum for multi-band field");
        let (sigma, _) = assign(reference, &vals);
        Ok(pair_value(&vals, sigma[pair.0], sigma[pair.1]))
    }

    fn node_value(&self, node: usize, pair: (usize, usize)) -> Complex64 {
        if self.two_band {
            self.quad[node]
        } else {
            pair_value(&self.eig[node], pair.0, pair.1)
        }
    }
}

pub fn degeneracy_contours_with(
    model: &BlochModel,
    kind: ContourKind,
    grid: (usize, usize),
    opts: &ContourOptions,
) -> Result<Vec<DegeneracyContour>> {
    let (nx, ny) = grid;
    if nx < 16 || ny < 16 {
        return Err(Error::config(format!(
            "contour grid must be at least 16x16, got {nx}x{ny}"
        )));
    }
    let n = model.bands();
    if n < 2 {
        return Ok(vec![]);
    }
    let g = Grid {
        nx,
        ny,
        hx: TAU / nx as f64,
        hy: TAU / ny as f64,
    };
    let two_band = n == 2;
    let nodes: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    let mut field = Field {
        model,
        two_band,
        quad: vec![],
        eig: vec![],
    };
    if two_band {
        field.quad = nodes
            .par_iter()
            .map(|&(i, j)| field.four_d(g.pos(i, j).reduce()))
            .collect();
    } else {
        field.eig = nodes
            .par_iter()
            .map(|&(i, j)| spectral::eigenvalues(model, g.pos(i, j).reduce()).map(|e| e.values))
            .collect::<Result<_>>()?;
    }

    // marching squares, row-major cell order
    let per_cell: Vec<Vec<(PointSpec, PointSpec)>> = nodes
        .par_iter()
        .map(|&(i, j)| cell_segments(&field, &g, i, j))
        .collect::<Result<_>>()?;

    let mut segments: Vec<(PointSpec, PointSpec)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (a, b) in per_cell.into_iter().flatten() {
        if a.id == b.id {
            continue;
        }
        let key = if a.id < b.id { (a.id, b.id) } else { (b.id, a.id) };
        if seen.insert(key) {
            segments.push((a, b));
        }
    }

    // refine every distinct crossing point once
    let mut specs: Vec<PointSpec> = Vec::new();
    let mut index: HashMap<PointId, usize> = HashMap::new();
    for (a, b) in &segments {
        for s in [a, b] {
            index.entry(s.id).or_insert_with(|| {
                specs.push(*s);
                specs.len() - 1
            });
        }
    }
    let refined: Vec<PointInfo> = specs
        .par_iter()
        .map(|s| refine_point(&field, s))
        .collect::<Result<_>>()?;
    let mut info: HashMap<PointId, PointInfo> = HashMap::new();
    for (s, r) in specs.iter().zip(refined) {
        info.insert(s.id, r);
    }

    let keep = |z: Complex64| match kind {
        ContourKind::Real => z.re <= 0.0,
        ContourKind::Imaginary => z.re >= 0.0,
    };

    // sign filter and splitting
    let mut eps: Option<Vec<ExceptionalPoint>> = None;
    let match_radius = opts.ep_match_cells * g.hx.hypot(g.hy);
    let mut kept: Vec<(PointId, PointId, (usize, usize))> = Vec::new();
    let mut split_eps: HashMap<PointId, Option<ExceptionalPoint>> = HashMap::new();
    for (si, (a, b)) in segments.iter().enumerate() {
        let ia = info[&a.id];
        let ib = info[&b.id];
        let pair = if matches!(a.id, PointId::Node { .. } | PointId::Edge { .. }) {
            a.pair
        } else {
            b.pair
        };
        match (keep(ia.g), keep(ib.g)) {
            (true, true) => kept.push((a.id, b.id, pair)),
            (false, false) => {}
            (ka, _) => {
                let (inside, outside) = if ka { (ia, ib) } else { (ib, ia) };
                let inside_id = if ka { a.id } else { b.id };
                let t = inside.g.re / (inside.g.re - outside.g.re);
                let (dx, dy) = inside.pos.displacement_to(&outside.pos);
                let chord = Lifted::new(inside.pos.kx() + t * dx, inside.pos.ky() + t * dy).reduce();
                if eps.is_none() {
                    eps = Some(locate_eps_with(model, grid, &opts.eps)?.eps);
                }
                let near = eps
                    .as_ref()
                    .expect("computed above")
                    .iter()
                    .map(|e| (e.location.distance(&chord), e))
                    .filter(|(d, _)| *d <= match_radius)
                    .min_by(|x, y| x.0.total_cmp(&y.0))
                    .map(|(_, e)| e.clone());
                let split = PointId::Split { seg: si };
                let pos = near.as_ref().map_or(chord, |e| e.location);
                info.insert(split, PointInfo { pos, g: Complex64::new(0.0, 0.0) });
                split_eps.insert(split, near);
                kept.push((inside_id, split, pair));
            }
        }
    }

    Ok(chain(&kept, &info, &split_eps, kind))
}

fn cell_segments(field: &Field<'_>, g: &Grid, i: usize, j: usize) -> Result<Vec<(PointSpec, PointSpec)>> {
    let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
    let node: [usize; 4] = corners.map(|(a, b)| g.node(a, b));
    let pos: [Lifted; 4] = corners.map(|(a, b)| g.pos(a, b));
    let n = field.model.bands();

    let sigmas: Vec<Vec<usize>> = if field.two_band {
        vec![vec![0, 1]; 4]
    } else {
        (0..4)
            .map(|c| assign(&field.eig[node[0]], &field.eig[node[c]]).0)
            .collect()
    };

    // (start corner, end corner, edge id at start node)
    let edges = [
        (0usize, 1usize, 2 * node[0]),
        (1, 2, 2 * node[1] + 1),
        (3, 2, 2 * node[3]),
        (0, 3, 2 * node[0] + 1),
    ];

    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let pair_at = |c: usize| sorted(sigmas[c][a], sigmas[c][b]);
            let vals: [Complex64; 4] = std::array::from_fn(|c| field.node_value(node[c], pair_at(c)));
            let inside: [bool; 4] = vals.map(|v| v.im <= 0.0);
            let crossing = |e: usize| -> Option<PointSpec> {
                let (s, t, edge) = edges[e];
                if inside[s] == inside[t] {
                    return None;
                }
                let zero_corner = if inside[s] { s } else { t };
                if vals[zero_corner].im == 0.0 {
                    let p = pos[zero_corner];
                    return Some(PointSpec {
                        id: PointId::Node {
                            node: node[zero_corner],
                            pair: pair_at(zero_corner),
                        },
                        from: p,
                        to: p,
                        start_node: node[zero_corner],
                        pair: pair_at(zero_corner),
                        f_from: 0.0,
                        f_to: 0.0,
                    });
                }
                Some(PointSpec {
                    id: PointId::Edge {
                        edge,
                        pair: pair_at(s),
                    },
                    from: pos[s],
                    to: pos[t],
                    start_node: node[s],
                    pair: pair_at(s),
                    f_from: vals[s].im,
                    f_to: vals[t].im,
                })
            };
            let crossed: Vec<usize> = (0..4).filter(|&e| inside[edges[e].0] != inside[edges[e].1]).collect();
            match crossed.len() {
                2 => out.push((crossing(crossed[0]).unwrap(), crossing(crossed[1]).unwrap())),
                4 => {
                    let center = pos[0].midpoint(&pos[2]).reduce();
                    let reference = (!field.two_band).then(|| field.eig[node[0]].as_slice());
                    let cv = field.value(center, reference, (a, b))?;
                    let center_inside = cv.im <= 0.0;
                    // edges: 0 bottom, 1 right, 2 top, 3 left
                    let pairs = if inside[0] == center_inside {
                        // corners 0 and 2 joined through the centre: cut off 1 and 3
                        [(0, 1), (2, 3)]
                    } else {
                        [(0, 3), (1, 2)]
                    };
                    for (e1, e2) in pairs {
                        out.push((crossing(e1).unwrap(), crossing(e2).unwrap()));
                    }
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

fn refine_point(field: &Field<'_>, s: &PointSpec) -> Result<PointInfo> {
    let reference = (!field.two_band).then(|| field.eig[s.start_node].as_slice());
    if let PointId::Node { .. } = s.id {
        let pos = s.from.reduce();
        return Ok(PointInfo {
            pos,
            g: field.node_value(s.start_node, s.pair),
        });
    }
    let at = |t: f64| s.from.lerp(&s.to, t).reduce();
    let f = |t: f64| field.value(at(t), reference, s.pair).map(|z| z.im);
    // Illinois false position on [0, 1]
    let (mut t0, mut f0, mut t1, mut f1) = (0.0, s.f_from, 1.0, s.f_to);
    let scale = f0.abs().max(f1.abs());
    for _ in 0..100 {
        let t = t1 - f1 * (t1 - t0) / (f1 - f0);
        let ft = f(t)?;
        if ft * f1 < 0.0 {
            t0 = t1;
            f0 = f1;
        } else {
            f0 *= 0.5;
        }
        t1 = t;
        f1 = ft;
        if ft == 0.0 || (t1 - t0).abs() < 1e-15 || ft.abs() < 1e-17 * scale {
            break;
        }
    }
    let pos = at(t1);
    Ok(PointInfo {
        pos,
        g: field.value(pos, reference, s.pair)?,
    })
}

fn chain(
    kept: &[(PointId, PointId, (usize, usize))],
    info: &HashMap<PointId, PointInfo>,
    split_eps: &HashMap<PointId, Option<ExceptionalPoint>>,
    kind: ContourKind,
) -> Vec<DegeneracyContour> {
    let mut adj: BTreeMap<PointId, Vec<usize>> = BTreeMap::new();
    for (si, (a, b, _)) in kept.iter().enumerate() {
        adj.entry(*a).or_default().push(si);
        adj.entry(*b).or_default().push(si);
    }
    let mut used = vec![false; kept.len()];
    let mut out = Vec::new();

    let walk = |start: PointId, used: &mut [bool]| -> Option<DegeneracyContour> {
        let first_seg = adj[&start].iter().copied().find(|&s| !used[s])?;
        let bands = kept[first_seg].2;
        let mut cur = start;
        let mut lifted = info[&start].pos.lifted();
        let mut poly = vec![lifted];
        let mut seg = Some(first_seg);
        while let Some(s) = seg {
            used[s] = true;
            let (a, b, _) = kept[s];
            let next = if a == cur { b } else { a };
            let (dx, dy) = info[&cur].pos.displacement_to(&info[&next].pos);
            lifted = Lifted::new(lifted.kx + dx, lifted.ky + dy);
            poly.push(lifted);
            cur = next;
            if cur == start {
                break;
            }
            seg = adj[&cur].iter().copied().find(|&s| !used[s]);
        }
        let closed = cur == start && poly.len() > 2;
        let mut contour = DegeneracyContour {
            kind,
            polyline: poly,
            closed,
            contractible: true,
            homotopy_class: (0, 0),
            bands,
            start_ep: None,
            end_ep: None,
            flagged: false,
        };
        if closed {
            let first = contour.polyline[0];
            let last = contour.polyline[contour.polyline.len() - 1];
            let wx = ((last.kx - first.kx) / TAU).round() as i32;
            let wy = ((last.ky - first.ky) / TAU).round() as i32;
            if wx < 0 || (wx == 0 && wy < 0) {
                contour.polyline.reverse();
                contour.homotopy_class = (-wx, -wy);
            } else {
                contour.homotopy_class = (wx, wy);
            }
            contour.contractible = contour.homotopy_class == (0, 0);
        } else {
            contour.start_ep = split_eps.get(&start).cloned().flatten();
            contour.end_ep = split_eps.get(&cur).cloned().flatten();
            contour.flagged = contour.start_ep.is_none() || contour.end_ep.is_none();
        }
        Some(contour)
    };

    // open chains first, starting from their lowest-indexed loose end
    for si in 0..kept.len() {
        for end in [kept[si].0, kept[si].1] {
            if !used[si] && adj[&end].len() == 1 {
                if let Some(c) = walk(end, &mut used) {
                    out.push(c);
                }
            }
        }
    }
    for si in 0..kept.len() {
        if !used[si] {
            if let Some(c) = walk(kept[si].0, &mut used) {
                out.push(c);
            }
        }
    }
    out
}
