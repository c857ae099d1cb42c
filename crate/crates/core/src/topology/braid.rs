//! Eigenvalue braid words along non-contractible loops.
//!
//! Strands are ordered by `(Re ε, Im ε)` at every sample. Each exchange of
//! neighbouring positions `i`, `i + 1` (1-based `i`) emits `±i`: positive when
//! the strand with the larger imaginary part moves from the larger-real to
//! the smaller-real position.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, Lifted, MomentumPoint};
use crate::permutation::Permutation;
use crate::spectral::{self, assign, canonical_cmp, loop_base, track_loop, Axis, LoopOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidWord {
    /// Signed 1-based generator indices: `i` is `σ_i`, `-i` is `σ_i⁻¹`.
    pub generators: Vec<i32>,
    pub axis: Axis,
    pub base: MomentumPoint,
    pub bands: usize,
    /// Monodromy of the same loop, from sheet tracking.
    pub monodromy: Permutation,
}

impl BraidWord {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Permutation of sheets induced by the word: sheet `s` at the base point
    /// is carried to sheet `π(s)`.
    pub fn induced_permutation(&self) -> Permutation {
        induced(&self.generators, self.bands)
    }

    /// Sum of exponents.
    pub fn writhe(&self) -> i64 {
        self.generators.iter().map(|g| g.signum() as i64).sum()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|&g| {
                if g > 0 {
                    format!("s{g}")
                } else {
                    format!("s{}^-1", -g)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Induced permutation of a word on `n` strands, positions identified with
/// sheet labels at the base point.
pub fn induced(generators: &[i32], n: usize) -> Permutation {
    // order[pos] = starting position of the strand now at pos
    let mut order: Vec<usize> = (0..n).collect();
    for &g in generators {
        let i = g.unsigned_abs() as usize;
        order.swap(i - 1, i);
    }
    let mut images = vec![0; n];
    for (pos, &s) in order.iter().enumerate() {
        images[s] = pos;
    }
    Permutation::from_images(images).expect("positions form a bijection")
}

/// Braid word of the loop along `axis` at transverse `offset`.
pub fn braid_word(model: &BlochModel, axis: Axis, offset: f64, opts: &LoopOptions) -> Result<BraidWord> {
    braid_word_at(model, axis, loop_base(axis, offset), opts)
}

pub fn braid_word_at(
    model: &BlochModel,
    axis: Axis,
    base: MomentumPoint,
    opts: &LoopOptions,
) -> Result<BraidWord> {
    let path = track_loop(model, axis, base, opts)?;
    let n = model.bands();
    let mut generators = Vec::new();
    let refiner = Refiner {
        model,
        max_depth: opts.track.max_depth,
    };
    for i in 0..path.len() - 1 {
        let va = path.values_at(i);
        let vb = path.values_at(i + 1);
        refiner.segment(path.samples[i], &va, path.samples[i + 1], &vb, 0, &mut generators)?;
    }
    let word = BraidWord {
        generators,
        axis,
        base,
        bands: n,
        monodromy: path.closure,
    };
    if word.induced_permutation() != word.monodromy {
        return Err(Error::Degeneracy {
            k: base,
            message: format!(
                "braid word {} induces {} but the loop monodromy is {}",
                word,
                word.induced_permutation(),
                word.monodromy
            ),
        });
    }
    Ok(word)
}

fn order_of(values: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| canonical_cmp(&values[a], &values[b]));
    idx
}

struct Refiner<'a> {
    model: &'a BlochModel,
    max_depth: u32,
}

impl Refiner<'_> {
    fn segment(
        &self,
        a: Lifted,
        va: &[Complex64],
        b: Lifted,
        vb: &[Complex64],
        depth: u32,
        out: &mut Vec<i32>,
    ) -> Result<()> {
        let oa = order_of(va);
        let ob = order_of(vb);
        if oa == ob {
            return Ok(());
        }
        let diff: Vec<usize> = (0..oa.len()).filter(|&p| oa[p] != ob[p]).collect();
        let single = diff.len() == 2 && diff[1] == diff[0] + 1 && oa[diff[0]] == ob[diff[1]];
        if single {
            let j = diff[0];
            let (lower, upper) = (oa[j], oa[j + 1]);
            let da = va[upper] - va[lower];
            let db = vb[upper] - vb[lower];
            let t = if da.re == db.re {
                0.5
            } else {
                (da.re / (da.re - db.re)).clamp(0.0, 1.0)
            };
            let im = da.im + t * (db.im - da.im);
            let scale = va.iter().chain(vb).map(|z| z.norm()).fold(1.0, f64::max);
            if im.abs() > 1e-9 * scale {
                let g = (j + 1) as i32;
                out.push(if im > 0.0 { g } else { -g });
                return Ok(());
            }
        }
        if depth >= self.max_depth {
            return Err(Error::Degeneracy {
                k: a.midpoint(&b).reduce(),
                message: "eigenvalue crossing cannot be resolved: real and imaginary parts coincide".into(),
            });
        }
        let mid = a.midpoint(&b);
        let raw = spectral::eigenvalues(self.model, mid.reduce())?.values;
        let (sigma, _) = assign(va, &raw);
        let vm: Vec<Complex64> = sigma.iter().map(|&j| raw[j]).collect();
        self.segment(a, va, mid, &vm, depth + 1, out)?;
        self.segment(mid, &vm, b, vb, depth + 1, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_state_has_empty_word() {
        let m = BlochModel::fermi_cut(0, 0).unwrap();
        for axis in [Axis::X, Axis::Y] {
            let w = braid_word(&m, axis, 0.4, &LoopOptions::default()).unwrap();
            assert!(w.is_empty());
            assert_eq!(w.to_string(), "e");
        }
    }

    #[test]
    fn cut_crossing_gives_one_generator() {
        let m = BlochModel::fermi_cut(1, 0).unwrap();
        let w = braid_word(&m, Axis::Y, PI, &LoopOptions::default()).unwrap();
        assert_eq!(w.len() % 2, 1, "{w}");
        assert!(w.generators.iter().all(|g| g.abs() == 1));
        assert!(!w.monodromy.is_identity());
        let w = braid_word(&m, Axis::X, 1.0, &LoopOptions::default()).unwrap();
        assert_eq!(w.len() % 2, 0, "{w}");
    }

    #[test]
    fn induced_permutation_of_words() {
        assert!(induced(&[1, -1], 2).is_identity());
        assert_eq!(induced(&[1], 3).images(), &[1, 0, 2]);
        // strand 0 moves right twice
        assert_eq!(induced(&[1, 2], 3).images(), &[2, 0, 1]);
    }
}
