//! Eigenvalues and continuous sheet tracking along paths.
//!
//! Eigenvalue sets are returned in canonical order (lexicographic in real,
//! then imaginary part). Along a path the sheets are continued by
//! minimum-total-distance matching between consecutive samples; a step is
//! bisected whenever the smallest eigenvalue gap at either end is below
//! `gap_ratio` times the largest matched displacement. For a closed path the
//! final strand values are matched back onto the initial set, giving the
//! closure (monodromy) permutation.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::model::{angle_delta, BlochModel, CMatrix, Lifted, MomentumPoint};
use crate::permutation::Permutation;

const SCHUR_MAX_ITER: usize = 10_000;

/// The unordered spectrum at one momentum, stored in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSet {
    pub k: MomentumPoint,
    pub values: Vec<Complex64>,
}

impl EigenSet {
    /// Smallest pairwise distance; `+∞` for fewer than two values.
    pub fn min_gap(&self) -> f64 {
        min_gap(&self.values)
    }
}

/// `D(k)` of a two-band model: eigenvalues are `h0 ± sqrt(D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discriminant {
    pub value: Complex64,
    pub k: MomentumPoint,
}

pub fn canonical_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_canonical(values: &mut [Complex64]) {
    values.sort_by(canonical_cmp);
}

pub(crate) fn min_gap(values: &[Complex64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            g = g.min((values[i] - values[j]).norm());
        }
    }
    g
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a 2×2 matrix by the quadratic formula.
pub fn eigenvalues_2x2(e: &[[Complex64; 2]; 2]) -> [Complex64; 2] {
    let h0 = (e[0][0] + e[1][1]) * 0.5;
    let d = disc_2x2(e);
    let r = d.sqrt();
    [h0 + r, h0 - r]
}

fn disc_2x2(e: &[[Complex64; 2]; 2]) -> Complex64 {
    let half = (e[0][0] - e[1][1]) * 0.5;
    half * half + e[0][1] * e[1][0]
}

/// Eigenvalues of a square complex matrix, unsorted.
///
/// Closed form for `n ≤ 2`; complex Schur decomposition otherwise, followed by
/// a determinant residual check.
pub fn matrix_eigenvalues(m: &CMatrix) -> std::result::Result<Vec<Complex64>, (String, f64)> {
    let n = m.nrows();
    match n {
        0 => Ok(vec![]),
        1 => Ok(vec![m[(0, 0)]]),
        2 => {
            let e = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
            Ok(eigenvalues_2x2(&e).to_vec())
        }
        _ => {
            let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
                .ok_or_else(|| ("Schur iteration did not converge".to_string(), f64::NAN))?;
            let vals = schur
                .eigenvalues()
                .ok_or_else(|| ("Schur form not triangular".to_string(), f64::NAN))?;
            let vals: Vec<Complex64> = vals.iter().copied().collect();
            let scale = frobenius(m).max(1.0);
            let worst = vals
                .iter()
                .map(|&ev| det_shifted(m, ev))
                .fold(0.0_f64, f64::max);
            if worst.is_nan() || worst > 1e-9 * scale.powi(n as i32) {
                return Err(("eigenvalue residual too large".to_string(), worst));
            }
            Ok(vals)
        }
    }
}

/// `|det(H - ε·1)|`.
pub fn det_shifted(m: &CMatrix, eps: Complex64) -> f64 {
    let n = m.nrows();
    let shifted = m - CMatrix::identity(n, n) * eps;
    shifted.determinant().norm()
}

pub fn eigenvalues(model: &BlochModel, k: MomentumPoint) -> Result<EigenSet> {
    let mut values = if let Some(e) = model.evaluate2(k) {
        eigenvalues_2x2(&e).to_vec()
    } else {
        let h = model.evaluate(k);
        matrix_eigenvalues(&h).map_err(|(message, residual)| Error::Numerical {
            k,
            message,
            residual,
        })?
    };
    sort_canonical(&mut values);
    Ok(EigenSet { k, values })
}

/// `D = (H11 - h0)² + H12·H21` with `h0 = tr H / 2`; two-band models only.
pub fn discriminant2(model: &BlochModel, k: MomentumPoint) -> Result<Discriminant> {
    let e = model.evaluate2(k).ok_or_else(|| {
        Error::Dimension(format!(
            "discriminant2 needs a 2-band model, got {} bands",
            model.bands()
        ))
    })?;
    Ok(Discriminant {
        value: disc_2x2(&e),
        k,
    })
}

/// Coefficients `c_0 … c_n` (low to high, `c_n = 1`) of `det(λ·1 - H)`,
/// by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let ident = CMatrix::identity(n, n);
    let mut mk = CMatrix::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + &ident * coeffs[n - k + 1];
        let am = m * &mk;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

/// Discriminant `Π_{p<q} (ε_p - ε_q)²` of the characteristic polynomial.
///
/// Computed from the Sylvester resultant `Res(p, p')`, so it is a smooth
/// function of the matrix entries (no eigenvalue ordering involved). For two
/// bands this equals `4·D`.
pub fn spectral_discriminant(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    if n < 2 {
        return Complex64::new(1.0, 0.0);
    }
    if n == 2 {
        let e = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
        return disc_2x2(&e) * 4.0;
    }
    let p = characteristic_polynomial(m);
    let dp: Vec<Complex64> = (1..=n).map(|i| p[i] * i as f64).collect();
    // Sylvester matrix of p (degree n) and p' (degree n-1), size 2n-1.
    let size = 2 * n - 1;
    let mut s = CMatrix::zeros(size, size);
    for r in 0..n - 1 {
        for (i, c) in p.iter().rev().enumerate() {
            s[(r, r + i)] = *c;
        }
    }
    for r in 0..n {
        for (i, c) in dp.iter().rev().enumerate() {
            s[(n - 1 + r, r + i)] = *c;
        }
    }
    let res = s.determinant();
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    res * sign
}

/// Minimum-total-distance assignment `from[i] -> to[σ(i)]`.
///
/// Returns `σ` and the largest matched displacement. Exhaustive for `n ≤ 6`,
/// Hungarian algorithm above that.
pub fn assign(from: &[Complex64], to: &[Complex64]) -> (Vec<usize>, f64) {
    let n = from.len();
    debug_assert_eq!(n, to.len());
    let sigma = match n {
        0 => vec![],
        1 => vec![0],
        2 => {
            let keep = (from[0] - to[0]).norm() + (from[1] - to[1]).norm();
            let swap = (from[0] - to[1]).norm() + (from[1] - to[0]).norm();
            if swap < keep {
                vec![1, 0]
            } else {
                vec![0, 1]
            }
        }
        3..=6 => exhaustive_assignment(from, to),
        _ => hungarian(from, to),
    };
    let disp = sigma
        .iter()
        .enumerate()
        .map(|(i, &j)| (from[i] - to[j]).norm())
        .fold(0.0_f64, f64::max);
    (sigma, disp)
}

fn exhaustive_assignment(from: &[Complex64], to: &[Complex64]) -> Vec<usize> {
    let n = from.len();
    let cost: Vec<Vec<f64>> = from
        .iter()
        .map(|a| to.iter().map(|b| (a - b).norm()).collect())
        .collect();
    let total = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>();
    // Heap's algorithm, iterative
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = total(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let t = total(&perm);
            if t < best_cost {
                best_cost = t;
                best.copy_from_slice(&perm);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn hungarian(from: &[Complex64], to: &[Complex64]) -> Vec<usize> {
    // O(n³) potentials formulation, 1-based internally.
    let n = from.len();
    let cost = |i: usize, j: usize| (from[i - 1] - to[j - 1]).norm();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut sigma = vec![0; n];
    for j in 1..=n {
        sigma[p[j] - 1] = j - 1;
    }
    sigma
}

/// Refinement controls for [`track_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    /// Maximum number of bisection levels per input step.
    pub max_depth: u32,
    /// Required ratio of smallest gap to matched displacement.
    pub gap_ratio: f64,
    /// Largest allowed distance between consecutive input samples.
    pub max_step: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            max_depth: 14,
            gap_ratio: 3.0,
            max_step: 0.25,
        }
    }
}

/// Continuously tracked eigenvalue strands along a path.
///
/// `strands[s][i]` is the value of strand `s` at `samples[i]`; strand `s`
/// starts on the `s`-th canonically ordered eigenvalue. `closure[s]` is the
/// index of the initial eigenvalue that strand `s` ends on (identity for open
/// paths).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetPath {
    pub samples: Vec<Lifted>,
    pub strands: Vec<Vec<Complex64>>,
    pub closure: Permutation,
    pub closed: bool,
}

impl SheetPath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn values_at(&self, i: usize) -> Vec<Complex64> {
        self.strands.iter().map(|s| s[i]).collect()
    }

    /// Column text: `index kx ky re_0 im_0 re_1 im_1 …`, one row per sample.
    pub fn to_columns(&self) -> String {
        let mut out = String::new();
        let n = self.strands.len();
        let mut header = String::from("# index kx ky");
        for s in 0..n {
            let _ = write!(header, " re_{s} im_{s}");
        }
        out.push_str(&header);
        out.push('\n');
        let closure: Vec<String> = self.closure.images().iter().map(|i| i.to_string()).collect();
        let _ = writeln!(
            out,
            "# closed {} closure {}",
            self.closed,
            closure.join(",")
        );
        for (i, k) in self.samples.iter().enumerate() {
            let _ = write!(out, "{i} {} {}", fmt_f64(k.kx), fmt_f64(k.ky));
            for s in &self.strands {
                let _ = write!(out, " {} {}", fmt_f64(s[i].re), fmt_f64(s[i].im));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_columns(text: &str) -> Result<SheetPath> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::config("empty sheet path"))?;
        let cols = header.trim_start_matches('#').split_whitespace().count();
        if cols < 3 || (cols - 3) % 2 != 0 {
            return Err(Error::config_at("line 1", "malformed sheet path header"));
        }
        let n = (cols - 3) / 2;
        let meta = lines
            .next()
            .ok_or_else(|| Error::config_at("line 2", "missing closure line"))?;
        let meta: Vec<&str> = meta.trim_start_matches('#').split_whitespace().collect();
        if meta.len() != 4 || meta[0] != "closed" || meta[2] != "closure" {
            return Err(Error::config_at("line 2", "malformed closure line"));
        }
        let closed = meta[1] == "true";
        let images: Vec<usize> = meta[3]
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| Error::config_at("line 2", "bad closure index")))
            .collect::<Result<_>>()?;
        let closure = Permutation::from_images(images)
            .ok_or_else(|| Error::config_at("line 2", "closure is not a permutation"))?;
        let mut samples = Vec::new();
        let mut strands = vec![Vec::new(); n];
        for (ln, line) in lines.enumerate() {
            let loc = format!("line {}", ln + 3);
            let f: Vec<f64> = line
                .split_whitespace()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|_| Error::config_at(loc.clone(), "bad number")))
                .collect::<Result<_>>()?;
            if f.len() != 2 + 2 * n {
                return Err(Error::config_at(loc, "wrong column count"));
            }
            samples.push(Lifted::new(f[0], f[1]));
            for s in 0..n {
                strands[s].push(Complex64::new(f[2 + 2 * s], f[3 + 2 * s]));
            }
        }
        Ok(SheetPath {
            samples,
            strands,
            closure,
            closed,
        })
    }
}

pub fn track(model: &BlochModel, path: &[Lifted]) -> Result<SheetPath> {
    track_with(model, path, &TrackOptions::default())
}

pub fn track_with(model: &BlochModel, path: &[Lifted], opts: &TrackOptions) -> Result<SheetPath> {
    if path.len() < 2 {
        return Err(Error::Geometry("a tracked path needs at least 2 samples".into()));
    }
    let first = eigenvalues(model, path[0].reduce())?.values;
    let mut tracker = Tracker {
        model,
        opts,
        samples: vec![path[0]],
        rows: vec![first],
    };
    for w in path.windows(2) {
        let step = w[0].distance(&w[1]);
        if step > opts.max_step {
            return Err(Error::Geometry(format!(
                "path step {step:.4} exceeds the maximum {:.4}",
                opts.max_step
            )));
        }
        let prev = tracker.rows.last().cloned().expect("non-empty");
        let next = eigenvalues(model, w[1].reduce())?.values;
        tracker.segment(w[0], &prev, w[1], next, 0)?;
    }
    let Tracker { samples, rows, .. } = tracker;

    let start = samples[0].reduce();
    let end = samples[samples.len() - 1].reduce();
    let closed = start.distance(&end) < 1e-9;
    let n = rows[0].len();
    let closure = if closed {
        let (sigma, _) = assign(&rows[rows.len() - 1], &rows[0]);
        Permutation::from_images(sigma).expect("assignment is a bijection")
    } else {
        Permutation::identity(n)
    };
    let mut strands = vec![Vec::with_capacity(rows.len()); n];
    for row in &rows {
        for (s, v) in row.iter().enumerate() {
            strands[s].push(*v);
        }
    }
    Ok(SheetPath {
        samples,
        strands,
        closure,
        closed,
    })
}

/// Golden-section search for the smallest eigenvalue gap on the segment.
fn smallest_gap_on(model: &BlochModel, a: Lifted, b: Lifted) -> Result<(f64, Lifted)> {
    let gap = |t: f64| -> Result<f64> { Ok(min_gap(&eigenvalues(model, a.lerp(&b, t).reduce())?.values)) };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut g1, mut g2) = (gap(x1)?, gap(x2)?);
    for _ in 0..80 {
        if g1 <= g2 {
            hi = x2;
            (x2, g2) = (x1, g1);
            x1 = hi - r * (hi - lo);
            g1 = gap(x1)?;
        } else {
            lo = x1;
            (x1, g1) = (x2, g2);
            x2 = lo + r * (hi - lo);
            g2 = gap(x2)?;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((gap(t)?.min(g1).min(g2), a.lerp(&b, t)))
}

struct Tracker<'a> {
    model: &'a BlochModel,
    opts: &'a TrackOptions,
    samples: Vec<Lifted>,
    rows: Vec<Vec<Complex64>>,
}

impl Tracker<'_> {
    /// Appends `b` (and any bisection points) with values in strand order.
    fn segment(
        &mut self,
        a: Lifted,
        va: &[Complex64],
        b: Lifted,
        vb: Vec<Complex64>,
        depth: u32,
    ) -> Result<()> {
        let matched = match match_step(va, &vb, self.opts.gap_ratio) {
            Ok(m) => m,
            Err(gap) => {
                if depth >= self.opts.max_depth {
                    let scale = va.iter().chain(vb.iter()).map(|z| z.norm()).fold(1.0, f64::max);
                    let (least, at) = smallest_gap_on(self.model, a, b)?;
                    // the gap grows like the square root of the distance to an EP2
                    return Err(if least.min(gap) <= 1e-6 * scale {
                        Error::Degeneracy {
                            k: at.reduce(),
                            message: format!(
                                "eigenvalues coalesce (gap {least:.3e}); the path runs through a degeneracy"
                            ),
                        }
                    } else {
                        Error::Tracking {
                            from: a.reduce(),
                            to: b.reduce(),
                            message: format!(
                                "matching still ambiguous after {} bisections (gap {gap:.3e})",
                                self.opts.max_depth
                            ),
                        }
                    });
                }
                let mid = a.midpoint(&b);
                let vm = eigenvalues(self.model, mid.reduce())?.values;
                self.segment(a, va, mid, vm, depth + 1)?;
                let vmid = self.rows.last().cloned().expect("non-empty");
                return self.segment(mid, &vmid, b, vb, depth + 1);
            }
        };
        self.samples.push(b);
        self.rows.push(matched);
        Ok(())
    }
}

/// Matches `next` onto `prev`, returning `next` in strand order, or the
/// offending gap when the step is ambiguous.
pub(crate) fn match_step(
    prev: &[Complex64],
    next: &[Complex64],
    gap_ratio: f64,
) -> std::result::Result<Vec<Complex64>, f64> {
    let (sigma, disp) = assign(prev, next);
    let gap = min_gap(prev).min(min_gap(next));
    if prev.len() >= 2 && gap < gap_ratio * disp {
        return Err(gap);
    }
    Ok(sigma.iter().map(|&j| next[j]).collect())
}

/// Loop direction on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => Err(Error::config(format!("axis must be x or y, got '{other}'"))),
        }
    }
}

/// Settings for non-contractible loop traversals.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopOptions {
    pub samples: usize,
    pub track: TrackOptions,
    /// Minimum torus distance between the loop and any point in `avoid`.
    pub exclusion_radius: f64,
    /// Known exceptional points the loop must stay away from.
    pub avoid: Vec<MomentumPoint>,
}

impl Default for LoopOptions {
    fn default() -> Self {
        LoopOptions {
            samples: 512,
            track: TrackOptions::default(),
            exclusion_radius: 1e-3,
            avoid: Vec::new(),
        }
    }
}

impl LoopOptions {
    pub fn with_samples(samples: usize) -> Self {
        LoopOptions {
            samples,
            ..LoopOptions::default()
        }
    }
}

/// Base point of the loop along `axis` at fixed transverse coordinate `offset`.
pub fn loop_base(axis: Axis, offset: f64) -> MomentumPoint {
    match axis {
        Axis::X => MomentumPoint::new(0.0, offset),
        Axis::Y => MomentumPoint::new(offset, 0.0),
    }
}

/// `samples + 1` lifted points of the full 2π loop along `axis` from `base`.
pub fn loop_path(axis: Axis, base: MomentumPoint, samples: usize) -> Vec<Lifted> {
    let step = std::f64::consts::TAU / samples as f64;
    (0..=samples)
        .map(|i| {
            let t = i as f64 * step;
            match axis {
                Axis::X => Lifted::new(base.kx() + t, base.ky()),
                Axis::Y => Lifted::new(base.kx(), base.ky() + t),
            }
        })
        .collect()
}

pub fn track_loop(
    model: &BlochModel,
    axis: Axis,
    base: MomentumPoint,
    opts: &LoopOptions,
) -> Result<SheetPath> {
    if opts.samples < 16 {
        return Err(Error::config(format!(
            "loops need at least 16 samples, got {}",
            opts.samples
        )));
    }
    for p in &opts.avoid {
        let d = match axis {
            Axis::X => angle_delta(base.ky(), p.ky()).abs(),
            Axis::Y => angle_delta(base.kx(), p.kx()).abs(),
        };
        if d < opts.exclusion_radius {
            return Err(Error::Degeneracy {
                k: *p,
                message: format!(
                    "loop along {} passes within {d:.3e} of an exceptional point",
                    axis.name()
                ),
            });
        }
    }
    track_with(model, &loop_path(axis, base, opts.samples), &opts.track)
}

/// Monodromy permutation of the loop along `axis` at transverse `offset`.
pub fn monodromy(
    model: &BlochModel,
    axis: Axis,
    offset: f64,
    opts: &LoopOptions,
) -> Result<Permutation> {
    monodromy_at(model, axis, loop_base(axis, offset), opts)
}

/// Monodromy of the loop along `axis` based at `base`, in the canonical
/// labelling of the spectrum at `base`.
pub fn monodromy_at(
    model: &BlochModel,
    axis: Axis,
    base: MomentumPoint,
    opts: &LoopOptions,
) -> Result<Permutation> {
    Ok(track_loop(model, axis, base, opts)?.closure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fc_trivial_eigenvalues() {
        let m = BlochModel::fermi_cut(0, 0).unwrap();
        let e = eigenvalues(&m, MomentumPoint::new(2.0, 1.0)).unwrap();
        assert!((e.values[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((e.values[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fa_eigenvalues_on_arc() {
        let m = BlochModel::fermi_arc(0.0);
        let r = 5f64.sqrt() / 2.0;
        for &ky in &[0.0, 1.0, 4.0] {
            let e = eigenvalues(&m, MomentumPoint::new(0.0, ky)).unwrap();
            assert!((e.values[0] - c(0.0, -r)).norm() < 1e-14);
            assert!((e.values[1] - c(0.0, r)).norm() < 1e-14);
        }
    }

    #[test]
    fn triangular_matrix_eigenvalues_are_its_diagonal() {
        let diag = [c(1.0, 2.0), c(-3.0, 0.5), c(0.25, -1.0)];
        let mut m = CMatrix::zeros(3, 3);
        for i in 0..3 {
            m[(i, i)] = diag[i];
            for j in i + 1..3 {
                m[(i, j)] = c(0.7 * (i + j) as f64, -0.3);
            }
        }
        let mut got = matrix_eigenvalues(&m).unwrap();
        let mut want = diag.to_vec();
        sort_canonical(&mut got);
        sort_canonical(&mut want);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn discriminant_examples() {
        let fa = BlochModel::fermi_arc(0.3);
        for &kx in &[0.0, 1.1, 2.5] {
            let d = discriminant2(&fa, MomentumPoint::new(kx, 0.4)).unwrap().value;
            let off = c(1.0 - f64::cos(kx), 0.5);
            let want = c(0.3, 1.0) * c(0.3, 1.0) + off * off;
            assert!((d - want).norm() < 1e-13);
        }
        let t = BlochModel::ep_pair(0.5).unwrap();
        let d = discriminant2(&t, MomentumPoint::new(PI / 6.0, 0.0)).unwrap().value;
        assert!(d.norm() < 1e-15);
        let fc = BlochModel::fermi_cut(1, 0).unwrap();
        let d = discriminant2(&fc, MomentumPoint::new(0.0, PI)).unwrap().value;
        assert!((d - c(-27.0, 0.0)).norm() < 1e-12);

        let three = BlochModel::constant(CMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            discriminant2(&three, MomentumPoint::new(0.0, 0.0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn spectral_discriminant_matches_eigenvalue_product() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.2), c(0.3, -0.1), c(0.0, 0.5),
                c(-0.4, 0.0), c(0.2, 1.0), c(0.7, 0.1),
                c(0.1, 0.1), c(0.9, -0.6), c(-1.2, 0.0),
            ],
        );
        let ev = matrix_eigenvalues(&m).unwrap();
        let mut prod = c(1.0, 0.0);
        for p in 0..3 {
            for q in p + 1..3 {
                prod *= (ev[p] - ev[q]) * (ev[p] - ev[q]);
            }
        }
        let d = spectral_discriminant(&m);
        assert!((d - prod).norm() < 1e-10 * prod.norm().max(1.0), "{d} vs {prod}");
    }

    #[test]
    fn assignment_agrees_with_hungarian() {
        let from: Vec<_> = (0..6).map(|i| c(i as f64, (i * i) as f64 * 0.1)).collect();
        let to: Vec<_> = [3, 0, 5, 1, 4, 2].iter().map(|&i| from[i] + c(0.05, -0.02)).collect();
        let a = exhaustive_assignment(&from, &to);
        let h = hungarian(&from, &to);
        assert_eq!(a, h);
        for (i, &j) in a.iter().enumerate() {
            assert!((from[i] - to[j]).norm() < 0.1);
        }
    }

    #[test]
    fn trivial_loop_has_identity_closure() {
        let m = BlochModel::fermi_cut(0, 0).unwrap();
        let p = monodromy(&m, Axis::X, 1.0, &LoopOptions::default()).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn fc10_swaps_along_y_only() {
        let m = BlochModel::fermi_cut(1, 0).unwrap();
        let py = monodromy(&m, Axis::Y, PI, &LoopOptions::default()).unwrap();
        assert_eq!(py.images(), &[1, 0]);
        let px = monodromy(&m, Axis::X, 1.0, &LoopOptions::default()).unwrap();
        assert!(px.is_identity());
    }

    #[test]
    fn retraced_path_closes_trivially() {
        let m = BlochModel::fermi_cut(1, 1).unwrap();
        let mut path: Vec<Lifted> = (0..=100).map(|i| Lifted::new(0.3, 0.05 * i as f64)).collect();
        let back: Vec<Lifted> = path.iter().rev().skip(1).copied().collect();
        path.extend(back);
        let sp = track(&m, &path).unwrap();
        assert!(sp.closed);
        assert!(sp.closure.is_identity());
    }

    #[test]
    fn loop_through_known_ep_is_rejected() {
        let m = BlochModel::ep_pair(0.5).unwrap();
        let opts = LoopOptions {
            avoid: vec![MomentumPoint::new(PI / 6.0, 0.0)],
            ..LoopOptions::default()
        };
        let err = monodromy(&m, Axis::X, 0.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Degeneracy { .. }));
    }

    #[test]
    fn loop_through_unknown_ep_fails_to_track() {
        let m = BlochModel::ep_pair(0.5).unwrap();
        let err = monodromy(&m, Axis::X, 0.0, &LoopOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Degeneracy { .. }), "{err}");
    }

    #[test]
    fn too_long_steps_are_rejected() {
        let m = BlochModel::fermi_cut(0, 0).unwrap();
        let err = track(&m, &[Lifted::new(0.0, 0.0), Lifted::new(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
        let err = monodromy(&m, Axis::X, 0.0, &LoopOptions::with_samples(8)).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn column_format_round_trips() {
        let m = BlochModel::fermi_cut(1, 0).unwrap();
        let sp = track_loop(&m, Axis::Y, MomentumPoint::new(1.0, 0.0), &LoopOptions::with_samples(32)).unwrap();
        let text = sp.to_columns();
        let back = SheetPath::from_columns(&text).unwrap();
        assert_eq!(back, sp);
        assert!(back.samples.last().unwrap().ky > TAU - 1e-12);
    }
}
