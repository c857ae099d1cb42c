//! Parameter sweeps: EP trajectories, pair creation and annihilation, and
//! invariant changes between EP-free regimes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, CMatrix, Lifted, MomentumPoint};
use crate::spectral::{Axis, LoopOptions};
use crate::topology::eps::{locate_eps_with, EpSearchOptions, ExceptionalPoint};
use crate::topology::invariants::{invariants_with, InvariantOptions, InvariantReport, PairInvariant};

/// Default symmetry-breaking term: `0.1·i` on the upper off-diagonal entry.
pub fn default_perturbation(bands: usize) -> Result<BlochModel> {
    let mut m = CMatrix::zeros(bands, bands);
    m[(0, 1)] = Complex64::new(0.0, 0.1);
    BlochModel::constant(m)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    /// `(1 − t)·start + t·end + perturbation`.
    Linear {
        start: BlochModel,
        end: BlochModel,
        perturbation: Option<BlochModel>,
    },
    /// A builtin whose parameters move linearly from `from` to `to`.
    Builtin {
        name: String,
        from: Vec<f64>,
        to: Vec<f64>,
    },
}

impl ModelFamily {
    /// Linear family with the default perturbation.
    pub fn linear(start: BlochModel, end: BlochModel) -> Result<Self> {
        let p = default_perturbation(start.bands())?;
        ModelFamily::linear_with(start, end, Some(p))
    }

    pub fn linear_with(start: BlochModel, end: BlochModel, perturbation: Option<BlochModel>) -> Result<Self> {
        if start.bands() != end.bands() {
            return Err(Error::config(format!(
                "family endpoints have {} and {} bands",
                start.bands(),
                end.bands()
            )));
        }
        if let Some(p) = &perturbation {
            if p.bands() != start.bands() {
                return Err(Error::config("perturbation band count differs from the endpoints"));
            }
        }
        Ok(ModelFamily::Linear {
            start,
            end,
            perturbation,
        })
    }

    pub fn builtin(name: &str, from: Vec<f64>, to: Vec<f64>) -> Result<Self> {
        if from.len() != to.len() {
            return Err(Error::config("parameter vectors of a builtin sweep differ in length"));
        }
        // validate both ends
        BlochModel::builtin(name, &from)?;
        BlochModel::builtin(name, &to)?;
        Ok(ModelFamily::Builtin {
            name: name.to_string(),
            from,
            to,
        })
    }

    pub fn bands(&self) -> usize {
        match self {
            ModelFamily::Linear { start, .. } => start.bands(),
            ModelFamily::Builtin { name, from, .. } => BlochModel::builtin(name, from).map_or(2, |m| m.bands()),
        }
    }

    pub fn at(&self, t: f64) -> Result<BlochModel> {
        match self {
            ModelFamily::Linear {
                start,
                end,
                perturbation,
            } => {
                let m = BlochModel::interpolate(start, end, t)?;
                match perturbation {
                    Some(p) => m.plus(p),
                    None => Ok(m),
                }
            }
            ModelFamily::Builtin { name, from, to } => {
                let params: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
                BlochModel::builtin(name, &params)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub grid: (usize, usize),
    /// Maximum bisection depth of a base t-interval.
    pub max_levels: u32,
    /// EPs further apart than this between consecutive samples are not matched.
    pub match_distance: f64,
    /// Loop base point for invariants.
    pub offsets: (f64, f64),
    pub loops: LoopOptions,
    pub eps: EpSearchOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grid: (128, 128),
            max_levels: 10,
            match_distance: 0.3,
            offsets: (0.3, 0.7),
            loops: LoopOptions::default(),
            eps: EpSearchOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub t: f64,
    pub eps: Vec<ExceptionalPoint>,
    /// Present for EP-free samples.
    pub report: Option<InvariantReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub location: Lifted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpTrack {
    pub charge: Option<f64>,
    pub points: Vec<TrackPoint>,
    pub starts_at_boundary: bool,
    pub ends_at_boundary: bool,
}

impl EpTrack {
    pub fn displacement(&self) -> (f64, f64) {
        let a = self.points[0].location;
        let b = self.points[self.points.len() - 1].location;
        (b.kx - a.kx, b.ky - a.ky)
    }

    /// Crossings of the periodic boundary `k = 0 (mod 2π)` per axis.
    pub fn boundary_crossings(&self) -> (usize, usize) {
        let count = |f: &dyn Fn(&Lifted) -> f64| -> usize {
            self.points
                .windows(2)
                .map(|w| {
                    let a = (f(&w[0].location) / TAU).floor() as i64;
                    let b = (f(&w[1].location) / TAU).floor() as i64;
                    (a - b).unsigned_abs() as usize
                })
                .sum()
        };
        (count(&|p| p.kx), count(&|p| p.ky))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Creation,
    Annihilation,
    BoundaryCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEvent {
    pub t_interval: (f64, f64),
    pub kind: EventKind,
    pub tracks: Vec<usize>,
    /// Boundary crossings only.
    pub axis: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpFreeInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub report: InvariantReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub t_samples: Vec<f64>,
    pub samples: Vec<SweepSample>,
    pub ep_tracks: Vec<EpTrack>,
    pub events: Vec<SweepEvent>,
    pub epfree_intervals: Vec<EpFreeInterval>,
    pub advisories: Vec<String>,
}

/// Alternative loop base points tried when the requested one hits a
/// near-degeneracy.
const OFFSET_SHIFTS: [(f64, f64); 4] = [(0.0, 0.0), (0.41, 0.29), (1.37, 0.83), (2.21, 1.91)];

fn sample_at(family: &ModelFamily, t: f64, opts: &SweepOptions) -> Result<SweepSample> {
    let model = family.at(t)?;
    let census = locate_eps_with(&model, opts.grid, &opts.eps)?;
    let report = if census.eps.is_empty() {
        Some(report_at(&model, opts)?)
    } else {
        None
    };
    Ok(SweepSample {
        t,
        eps: census.eps,
        report,
    })
}

fn report_at(model: &BlochModel, opts: &SweepOptions) -> Result<InvariantReport> {
    let inv = InvariantOptions {
        grid: opts.grid,
        loops: opts.loops.clone(),
        eps: opts.eps.clone(),
    };
    let mut last = None;
    for (dx, dy) in OFFSET_SHIFTS {
        match invariants_with(model, (opts.offsets.0 + dx, opts.offsets.1 + dy), &inv) {
            Ok(r) => return Ok(r),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn same_class(a: &InvariantReport, b: &InvariantReport) -> bool {
    let bits = |r: &InvariantReport| -> Vec<(u8, u8)> { r.m_matrix.iter().map(|m| (m.m_x, m.m_y)).collect() };
    a.ground_state == b.ground_state && bits(a) == bits(b)
}

/// Greedy nearest matching of `next` onto `prev` respecting charges.
fn match_eps(prev: &[ExceptionalPoint], next: &[ExceptionalPoint], limit: f64) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in prev.iter().enumerate() {
        for (j, b) in next.iter().enumerate() {
            let compatible = match (a.charge, b.charge) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            };
            let d = a.location.distance(&b.location);
            if compatible && d < limit {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![None; prev.len()];
    let mut taken = vec![false; next.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !taken[j] {
            out[i] = Some(j);
            taken[j] = true;
        }
    }
    out
}

fn needs_refinement(a: &SweepSample, b: &SweepSample, opts: &SweepOptions) -> bool {
    if a.eps.len() != b.eps.len() {
        return true;
    }
    if match_eps(&a.eps, &b.eps, opts.match_distance).iter().any(Option::is_none) {
        return true;
    }
    match (&a.report, &b.report) {
        (Some(x), Some(y)) => !same_class(x, y),
        _ => false,
    }
}

pub fn sweep(family: &ModelFamily, t_count: usize, grid: (usize, usize)) -> Result<SweepResult> {
    sweep_with(
        family,
        t_count,
        &SweepOptions {
            grid,
            ..SweepOptions::default()
        },
    )
}

pub fn sweep_with(family: &ModelFamily, t_count: usize, opts: &SweepOptions) -> Result<SweepResult> {
    if t_count < 8 {
        return Err(Error::config(format!("sweeps need at least 8 t samples, got {t_count}")));
    }
    let base: Vec<f64> = (0..t_count).map(|i| i as f64 / (t_count - 1) as f64).collect();
    let mut samples: Vec<SweepSample> = base
        .par_iter()
        .map(|&t| sample_at(family, t, opts))
        .collect::<Result<_>>()?;
    let min_width = 1.0 / (t_count - 1) as f64 / f64::from(1u32 << opts.max_levels);
    let mut advisories = Vec::new();

    loop {
        let mids: Vec<f64> = samples
            .windows(2)
            .filter(|w| w[1].t - w[0].t > min_width * 1.5 && needs_refinement(&w[0], &w[1], opts))
            .map(|w| 0.5 * (w[0].t + w[1].t))
            .collect();
        if mids.is_empty() {
            break;
        }
        let new: Vec<SweepSample> = mids
            .par_iter()
            .map(|&t| sample_at(family, t, opts))
            .collect::<Result<_>>()?;
        samples.extend(new);
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
    }

    for w in samples.windows(2) {
        let (a, b) = (w[0].eps.len(), w[1].eps.len());
        if a.abs_diff(b) % 2 == 1 {
            advisories.push(format!(
                "EP count changes by an odd amount ({a} -> {b}) in t in [{:.6}, {:.6}]; the event is not resolved",
                w[0].t, w[1].t
            ));
        }
    }

    let (ep_tracks, mut events) = build_tracks(&samples, opts.match_distance);
    events.sort_by(|a, b| a.t_interval.0.total_cmp(&b.t_interval.0));
    let epfree_intervals = build_intervals(family, &samples, opts, &mut advisories)?;

    Ok(SweepResult {
        t_samples: samples.iter().map(|s| s.t).collect(),
        samples,
        ep_tracks,
        events,
        epfree_intervals,
        advisories,
    })
}

fn build_tracks(samples: &[SweepSample], limit: f64) -> (Vec<EpTrack>, Vec<SweepEvent>) {
    let mut tracks: Vec<EpTrack> = Vec::new();
    let mut events = Vec::new();
    // track index of each EP of the previous sample
    let mut active: Vec<usize> = Vec::new();
    for (si, s) in samples.iter().enumerate() {
        let mut current = vec![usize::MAX; s.eps.len()];
        if si == 0 {
            for (j, ep) in s.eps.iter().enumerate() {
                current[j] = tracks.len();
                tracks.push(EpTrack {
                    charge: ep.charge,
                    points: vec![TrackPoint {
                        t: s.t,
                        location: ep.location.lifted(),
                    }],
                    starts_at_boundary: true,
                    ends_at_boundary: false,
                });
            }
            active = current;
            continue;
        }
        let prev = &samples[si - 1];
        let matched = match_eps(&prev.eps, &s.eps, limit);
        let interval = (prev.t, s.t);
        let mut ended = Vec::new();
        for (i, m) in matched.iter().enumerate() {
            let tr = active[i];
            match m {
                Some(j) => {
                    let last = tracks[tr].points.last().expect("non-empty").location;
                    let (dx, dy) = last.reduce().displacement_to(&s.eps[*j].location);
                    let next = Lifted::new(last.kx + dx, last.ky + dy);
                    for (axis, a, b) in [(Axis::X, last.kx, next.kx), (Axis::Y, last.ky, next.ky)] {
                        if (a / TAU).floor() != (b / TAU).floor() {
                            events.push(SweepEvent {
                                t_interval: interval,
                                kind: EventKind::BoundaryCrossing,
                                tracks: vec![tr],
                                axis: Some(axis),
                            });
                        }
                    }
                    tracks[tr].points.push(TrackPoint { t: s.t, location: next });
                    current[*j] = tr;
                }
                None => ended.push(tr),
            }
        }
        let mut started = Vec::new();
        for (j, ep) in s.eps.iter().enumerate() {
            if current[j] == usize::MAX {
                current[j] = tracks.len();
                started.push(tracks.len());
                tracks.push(EpTrack {
                    charge: ep.charge,
                    points: vec![TrackPoint {
                        t: s.t,
                        location: ep.location.lifted(),
                    }],
                    starts_at_boundary: false,
                    ends_at_boundary: false,
                });
            }
        }
        for (kind, group) in [(EventKind::Annihilation, ended), (EventKind::Creation, started)] {
            for pair in pair_up(&tracks, group, kind) {
                events.push(SweepEvent {
                    t_interval: interval,
                    kind,
                    tracks: pair,
                    axis: None,
                });
            }
        }
        active = current;
    }
    for &tr in &active {
        tracks[tr].ends_at_boundary = true;
    }
    (tracks, events)
}

/// Groups tracks that end (or start) within one t-step into opposite-charge
/// pairs by proximity; leftovers form single-track events.
fn pair_up(tracks: &[EpTrack], mut group: Vec<usize>, kind: EventKind) -> Vec<Vec<usize>> {
    let point = |tr: usize| -> MomentumPoint {
        let p = match kind {
            EventKind::Annihilation => tracks[tr].points.last(),
            _ => tracks[tr].points.first(),
        };
        p.expect("non-empty").location.reduce()
    };
    let mut out = Vec::new();
    group.sort_unstable();
    while let Some(a) = group.first().copied() {
        group.remove(0);
        let partner = group
            .iter()
            .enumerate()
            .filter(|(_, &b)| match (tracks[a].charge, tracks[b].charge) {
                (Some(x), Some(y)) => x == -y,
                _ => true,
            })
            .min_by(|x, y| point(a).distance(&point(*x.1)).total_cmp(&point(a).distance(&point(*y.1))))
            .map(|(i, _)| i);
        match partner {
            Some(i) => {
                let b = group.remove(i);
                out.push(vec![a, b]);
            }
            None => out.push(vec![a]),
        }
    }
    out
}

fn build_intervals(
    family: &ModelFamily,
    samples: &[SweepSample],
    opts: &SweepOptions,
    advisories: &mut Vec<String>,
) -> Result<Vec<EpFreeInterval>> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = None;
    for (i, s) in samples.iter().enumerate() {
        match (s.report.is_some(), start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                runs.push((a, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        runs.push((a, samples.len() - 1));
    }

    let mids: Vec<Option<SweepSample>> = runs
        .par_iter()
        .map(|&(a, b)| {
            if a == b {
                return Ok(None);
            }
            sample_at(family, 0.5 * (samples[a].t + samples[b].t), opts).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for (&(a, b), mid) in runs.iter().zip(mids) {
        let first = samples[a].report.as_ref().expect("EP-free sample");
        for s in &samples[a..=b] {
            let r = s.report.as_ref().expect("EP-free sample");
            if !same_class(first, r) {
                return Err(Error::Numerical {
                    k: r.base,
                    message: format!(
                        "invariants change inside the EP-free interval t in [{}, {}] (at t = {}); an exceptional point was missed or tracking failed",
                        samples[a].t, samples[b].t, s.t
                    ),
                    residual: 0.0,
                });
            }
        }
        let report = match mid {
            Some(SweepSample { report: Some(r), .. }) => {
                if !same_class(first, &r) {
                    return Err(Error::Numerical {
                        k: r.base,
                        message: format!(
                            "invariants at the midpoint of t in [{}, {}] differ from its ends",
                            samples[a].t, samples[b].t
                        ),
                        residual: 0.0,
                    });
                }
                r
            }
            Some(SweepSample { t, eps, .. }) => {
                advisories.push(format!(
                    "{} exceptional point(s) found at t = {t} between EP-free samples",
                    eps.len()
                ));
                first.clone()
            }
            None => first.clone(),
        };
        out.push(EpFreeInterval {
            t_start: samples[a].t,
            t_end: samples[b].t,
            report,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFlip {
    pub p: usize,
    pub q: usize,
    pub x: bool,
    pub y: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub flips: Vec<PairFlip>,
    pub flipped_bits: usize,
    pub tracks: Vec<usize>,
    /// Crossings of the periodic boundary along kx and ky by the intervening
    /// worldlines, including the joins between creation and annihilation
    /// partners.
    pub boundary_crossings: (usize, usize),
    /// Windings of the closed EP worldlines formed by joining tracks at their
    /// creation and annihilation partners.
    pub cycles: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreadingReport {
    pub transitions: Vec<Transition>,
    pub total_flipped_bits: usize,
}

fn flips_between(a: &[PairInvariant], b: &[PairInvariant]) -> Vec<PairFlip> {
    a.iter()
        .zip(b)
        .map(|(x, y)| PairFlip {
            p: x.p,
            q: x.q,
            x: x.m_x != y.m_x,
            y: x.m_y != y.m_y,
        })
        .collect()
}

pub fn threading_report(result: &SweepResult) -> ThreadingReport {
    let mut transitions = Vec::new();
    for w in result.epfree_intervals.windows(2) {
        let (lo, hi) = (w[0].t_end, w[1].t_start);
        let flips = flips_between(&w[0].report.m_matrix, &w[1].report.m_matrix);
        let flipped_bits = flips.iter().map(|f| usize::from(f.x) + usize::from(f.y)).sum();
        let tracks: Vec<usize> = result
            .ep_tracks
            .iter()
            .enumerate()
            .filter(|(_, tr)| tr.points.iter().all(|p| p.t > lo && p.t < hi))
            .map(|(i, _)| i)
            .collect();
        let mut bx = 0;
        let mut by = 0;
        for &i in &tracks {
            let (x, y) = result.ep_tracks[i].boundary_crossings();
            bx += x;
            by += y;
        }
        // a pair may nucleate or merge across the seam itself
        for e in &result.events {
            if e.tracks.len() != 2 || !e.tracks.iter().all(|t| tracks.contains(t)) {
                continue;
            }
            let end = |tr: usize| {
                let pts = &result.ep_tracks[tr].points;
                let p = match e.kind {
                    EventKind::Annihilation => &pts[pts.len() - 1],
                    _ => &pts[0],
                };
                p.location.reduce()
            };
            let (a, b) = (end(e.tracks[0]), end(e.tracks[1]));
            let (dx, dy) = a.displacement_to(&b);
            bx += usize::from(!(0.0..TAU).contains(&(a.kx() + dx)));
            by += usize::from(!(0.0..TAU).contains(&(a.ky() + dy)));
        }
        let cycles = worldline_cycles(result, &tracks);
        transitions.push(Transition {
            from: (w[0].t_start, w[0].t_end),
            to: (w[1].t_start, w[1].t_end),
            flips,
            flipped_bits,
            tracks,
            boundary_crossings: (bx, by),
            cycles,
        });
    }
    let total_flipped_bits = transitions.iter().map(|t| t.flipped_bits).sum();
    ThreadingReport {
        transitions,
        total_flipped_bits,
    }
}

/// Follows tracks forward, jumps to the annihilation partner, follows it
/// backward, jumps to its creation partner, and so on until the walk closes.
fn worldline_cycles(result: &SweepResult, tracks: &[usize]) -> Vec<(i64, i64)> {
    let partner = |kind: EventKind, tr: usize| -> Option<usize> {
        result
            .events
            .iter()
            .find(|e| e.kind == kind && e.tracks.len() == 2 && e.tracks.contains(&tr))
            .map(|e| if e.tracks[0] == tr { e.tracks[1] } else { e.tracks[0] })
    };
    let ends = |tr: usize| {
        let pts = &result.ep_tracks[tr].points;
        (pts[0].location, pts[pts.len() - 1].location)
    };
    let mut seen = vec![false; result.ep_tracks.len()];
    let mut out = Vec::new();
    'outer: for &start in tracks {
        if seen[start] {
            continue;
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        let mut cur = start;
        loop {
            seen[cur] = true;
            let (a, b) = ends(cur);
            sx += b.kx - a.kx;
            sy += b.ky - a.ky;
            let Some(back) = partner(EventKind::Annihilation, cur) else { continue 'outer };
            let (ba, bb) = ends(back);
            let (gx, gy) = b.reduce().displacement_to(&bb.reduce());
            sx += gx - (bb.kx - ba.kx);
            sy += gy - (bb.ky - ba.ky);
            seen[back] = true;
            let Some(next) = partner(EventKind::Creation, back) else { continue 'outer };
            let (na, _) = ends(next);
            let (gx, gy) = ba.reduce().displacement_to(&na.reduce());
            sx += gx;
            sy += gy;
            if next == start {
                break;
            }
            if seen[next] || !tracks.contains(&next) {
                continue 'outer;
            }
            cur = next;
        }
        out.push(((sx / TAU).round() as i64, (sy / TAU).round() as i64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_has_one_interval() {
        let m = BlochModel::fermi_cut(1, 1).unwrap();
        let fam = ModelFamily::linear_with(m.clone(), m, None).unwrap();
        let r = sweep(&fam, 8, (32, 32)).unwrap();
        assert_eq!(r.epfree_intervals.len(), 1);
        let iv = &r.epfree_intervals[0];
        assert_eq!((iv.t_start, iv.t_end), (0.0, 1.0));
        assert_eq!(iv.report.class_label, Some((1, 1)));
        assert!(r.events.is_empty());
        assert_eq!(r.t_samples.len(), 8);
    }

    #[test]
    fn ep_pair_family_keeps_eight_tracks() {
        let fam = ModelFamily::builtin("TEST", vec![0.2], vec![0.9]).unwrap();
        let r = sweep(&fam, 8, (64, 64)).unwrap();
        assert_eq!(r.ep_tracks.len(), 8);
        assert!(r.ep_tracks.iter().all(|t| t.starts_at_boundary && t.ends_at_boundary));
        assert!(r
            .events
            .iter()
            .all(|e| e.kind != EventKind::Creation && e.kind != EventKind::Annihilation));
        assert!(r.epfree_intervals.is_empty());
    }

    #[test]
    fn too_few_samples() {
        let fam = ModelFamily::builtin("TEST", vec![0.2], vec![0.9]).unwrap();
        assert!(sweep(&fam, 4, (32, 32)).is_err());
    }

    #[test]
    fn worldline_of_a_threaded_pair() {
        // pair created at ky = 1, one member drifts once around y before annihilating
        let pt = |t: f64, kx: f64, ky: f64| TrackPoint {
            t,
            location: Lifted::new(kx, ky),
        };
        let a = EpTrack {
            charge: Some(0.5),
            points: vec![pt(0.2, 1.0, 1.0), pt(0.5, 1.0, 1.0 + 3.0), pt(0.8, 1.0, 1.0 + TAU)],
            starts_at_boundary: false,
            ends_at_boundary: false,
        };
        let b = EpTrack {
            charge: Some(-0.5),
            points: vec![pt(0.2, 1.0, 1.0), pt(0.8, 1.0, 1.0)],
            starts_at_boundary: false,
            ends_at_boundary: false,
        };
        let result = SweepResult {
            t_samples: vec![],
            samples: vec![],
            ep_tracks: vec![a, b],
            events: vec![
                SweepEvent {
                    t_interval: (0.1, 0.2),
                    kind: EventKind::Creation,
                    tracks: vec![0, 1],
                    axis: None,
                },
                SweepEvent {
                    t_interval: (0.8, 0.9),
                    kind: EventKind::Annihilation,
                    tracks: vec![0, 1],
                    axis: None,
                },
            ],
            epfree_intervals: vec![],
            advisories: vec![],
        };
        assert_eq!(worldline_cycles(&result, &[0, 1]), vec![(0, 1)]);
        assert_eq!(result.ep_tracks[0].boundary_crossings(), (0, 1));
    }
}
