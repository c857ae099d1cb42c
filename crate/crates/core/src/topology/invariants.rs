//! Sheet-connectivity invariants of EP-free spectra and their classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, MomentumPoint};
use crate::permutation::Permutation;
use crate::spectral::{monodromy_at, Axis, LoopOptions};
use crate::topology::eps::{locate_eps_with, EpSearchOptions, ExceptionalPoint};

/// Two-band bit: 1 when the loop exchanges the two sheets.
pub fn two_band_bit(pi: &Permutation) -> u8 {
    u8::from(pi.apply(0) != 0)
}

/// Pair bit: 1 when repeated application of `pi` carries sheet `q` to sheet `p`.
pub fn pair_bit(pi: &Permutation, p: usize, q: usize) -> u8 {
    u8::from(pi.orbit_contains(q, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairInvariant {
    /// Sheet labels (0-based, canonical order at the base point), `p < q`.
    pub p: usize,
    pub q: usize,
    pub m_x: u8,
    pub m_y: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub bands: usize,
    /// Common base point of both loops.
    pub base: MomentumPoint,
    pub pi_x: Option<Permutation>,
    pub pi_y: Option<Permutation>,
    pub m_matrix: Vec<PairInvariant>,
    pub eps: Vec<ExceptionalPoint>,
    pub ground_state: bool,
    pub class_label: Option<(u8, u8)>,
    pub commuting: Option<bool>,
    pub diagnostics: Vec<String>,
}

impl InvariantReport {
    pub fn pair(&self, p: usize, q: usize) -> Option<&PairInvariant> {
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        self.m_matrix.iter().find(|m| m.p == p && m.q == q)
    }

    /// Pairs with at least one non-zero bit.
    pub fn nonzero_pairs(&self) -> usize {
        self.m_matrix.iter().filter(|m| m.m_x != 0 || m.m_y != 0).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantOptions {
    pub grid: (usize, usize),
    pub loops: LoopOptions,
    pub eps: EpSearchOptions,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            grid: (128, 128),
            loops: LoopOptions::default(),
            eps: EpSearchOptions::default(),
        }
    }
}

/// `offsets = (kx0, ky0)` is the shared base point: the x loop runs at
/// `ky = ky0`, the y loop at `kx = kx0`.
pub fn invariants(model: &BlochModel, offsets: (f64, f64), samples: usize) -> Result<InvariantReport> {
    let opts = InvariantOptions {
        loops: LoopOptions::with_samples(samples),
        ..InvariantOptions::default()
    };
    invariants_with(model, offsets, &opts)
}

pub fn invariants_with(
    model: &BlochModel,
    offsets: (f64, f64),
    opts: &InvariantOptions,
) -> Result<InvariantReport> {
    let census = locate_eps_with(model, opts.grid, &opts.eps)?;
    let base = MomentumPoint::new(offsets.0, offsets.1);
    let n = model.bands();
    let mut report = InvariantReport {
        bands: n,
        base,
        pi_x: None,
        pi_y: None,
        m_matrix: Vec::new(),
        eps: census.eps,
        ground_state: false,
        class_label: None,
        commuting: None,
        diagnostics: census.advisories,
    };
    if !report.eps.is_empty() {
        report.diagnostics.push(format!(
            "invariants undefined: {} exceptional point(s) present",
            report.eps.len()
        ));
        return Ok(report);
    }
    report.ground_state = true;
    let pi_x = monodromy_at(model, Axis::X, base, &opts.loops)?;
    let pi_y = monodromy_at(model, Axis::Y, base, &opts.loops)?;
    fill_from_monodromies(&mut report, pi_x, pi_y);
    Ok(report)
}

fn fill_from_monodromies(report: &mut InvariantReport, pi_x: Permutation, pi_y: Permutation) {
    let n = report.bands;
    for p in 0..n {
        for q in p + 1..n {
            report.m_matrix.push(PairInvariant {
                p,
                q,
                m_x: pair_bit(&pi_x, p, q),
                m_y: pair_bit(&pi_y, p, q),
            });
        }
    }
    let commuting = pi_x.compose(&pi_y) == pi_y.compose(&pi_x);
    if !commuting {
        report
            .diagnostics
            .push(format!("monodromies do not commute: pi_x = {pi_x}, pi_y = {pi_y}"));
    }
    report.commuting = Some(commuting);
    if n == 2 {
        report.class_label = Some((two_band_bit(&pi_x), two_band_bit(&pi_y)));
    }
    report.pi_x = Some(pi_x);
    report.pi_y = Some(pi_y);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    TwoBand {
        m_x: u8,
        m_y: u8,
    },
    MultiBand {
        bands: usize,
        pairs: Vec<PairInvariant>,
    },
    /// Exceptional points present: the content of the excitation.
    Excited {
        count: usize,
        orders: Vec<u32>,
        charges: Vec<Option<f64>>,
        total_charge: Option<f64>,
    },
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::TwoBand { m_x, m_y } => format!("({m_x},{m_y})"),
            Classification::MultiBand { pairs, .. } => {
                let parts: Vec<String> = pairs
                    .iter()
                    .map(|m| format!("{}{}:({},{})", m.p + 1, m.q + 1, m.m_x, m.m_y))
                    .collect();
                format!("[{}]", parts.join(" "))
            }
            Classification::Excited { count, total_charge, .. } => match total_charge {
                Some(c) => format!("excited eps={count} charge={c}"),
                None => format!("excited eps={count}"),
            },
        }
    }
}

pub fn classify(report: &InvariantReport) -> Classification {
    if !report.ground_state {
        let charges: Vec<Option<f64>> = report.eps.iter().map(|e| e.charge).collect();
        let total_charge = charges.iter().copied().sum::<Option<f64>>();
        return Classification::Excited {
            count: report.eps.len(),
            orders: report.eps.iter().map(|e| e.order).collect(),
            charges,
            total_charge,
        };
    }
    match report.class_label {
        Some((m_x, m_y)) => Classification::TwoBand { m_x, m_y },
        None => Classification::MultiBand {
            bands: report.bands,
            pairs: report.m_matrix.clone(),
        },
    }
}

/// Number of distinct excitation types for `n` sheets: `2ⁿ − (n + 1)`.
pub fn excitation_type_count(n: u32) -> Result<u64> {
    if n < 2 {
        return Err(Error::config(format!("excitation types need at least 2 sheets, got {n}")));
    }
    if n > 63 {
        return Err(Error::config(format!("sheet count {n} too large")));
    }
    let closed = (1u64 << n) - (n as u64 + 1);
    let summed = excitation_type_count_binomial(n);
    debug_assert_eq!(closed, summed);
    Ok(closed)
}

/// The same count as a sum of binomial coefficients `C(n, j)` for `j = 2..=n`.
pub fn excitation_type_count_binomial(n: u32) -> u64 {
    (2..=n as u64).map(|j| binomial(n as u64, j)).sum()
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bits() {
        let swap = Permutation::transposition(2, 0, 1);
        assert_eq!(two_band_bit(&swap), 1);
        assert_eq!(pair_bit(&swap, 0, 1), 1);
        assert_eq!(two_band_bit(&Permutation::identity(2)), 0);
        let cyc = Permutation::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(pair_bit(&cyc, 0, 2), 1);
        assert_eq!(pair_bit(&cyc, 1, 1), 0);
    }

    #[test]
    fn fermi_cut_classes() {
        let expected = [((0, 0), (0, 0)), ((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (1, 1))];
        for ((a, b), class) in expected {
            let m = BlochModel::fermi_cut(a, b).unwrap();
            let r = invariants(&m, (0.3, 0.7), 256).unwrap();
            assert!(r.ground_state);
            assert_eq!(r.class_label, Some(class), "FC({a},{b})");
            assert_eq!(r.commuting, Some(true));
            assert_eq!(classify(&r), Classification::TwoBand { m_x: class.0, m_y: class.1 });
        }
    }

    #[test]
    fn ep_pair_model_is_excited() {
        let m = BlochModel::ep_pair(0.5).unwrap();
        let r = invariants(&m, (PI / 2.0, PI / 2.0), 256).unwrap();
        assert!(!r.ground_state);
        assert!(r.class_label.is_none());
        match classify(&r) {
            Classification::Excited { count, total_charge, .. } => {
                assert_eq!(count, 8);
                assert_eq!(total_charge, Some(0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counts() {
        assert_eq!(excitation_type_count(2).unwrap(), 1);
        assert_eq!(excitation_type_count(3).unwrap(), 4);
        assert!(excitation_type_count(1).is_err());
    }
}
