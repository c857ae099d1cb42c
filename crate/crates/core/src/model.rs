//! Non-Hermitian Bloch Hamiltonians on the Brillouin-zone torus.
//!
//! A [`BlochModel`] maps a momentum `k = (kx, ky)` on the torus `[0, 2π)²` to
//! an `n × n` complex matrix. Models are either one of the closed-form
//! built-ins, a Bloch sum over hopping terms
//! `H(k) = Σ_R A_R exp(i (kx Rx + ky Ry))`, or composites (linear
//! combinations and direct sums) of other models.
//!
//! Momenta handed to [`BlochModel::evaluate`] are always reduced modulo 2π
//! first, so every model is exactly periodic by construction. Paths that wind
//! around the torus are expressed in unreduced [`Lifted`] coordinates.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Minimal-image difference `b - a` of two angles, in `[-π, π)`.
pub fn angle_delta(a: f64, b: f64) -> f64 {
    let d = (b - a + PI).rem_euclid(TAU) - PI;
    if d >= PI {
        d - TAU
    } else {
        d
    }
}

/// A point of the Brillouin zone, stored reduced to `[0, 2π)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPoint {
    kx: f64,
    ky: f64,
}

impl MomentumPoint {
    pub fn new(kx: f64, ky: f64) -> Self {
        MomentumPoint {
            kx: wrap_angle(kx),
            ky: wrap_angle(ky),
        }
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn ky(&self) -> f64 {
        self.ky
    }

    /// Torus distance: Euclidean norm of the minimal-image displacement.
    pub fn distance(&self, other: &MomentumPoint) -> f64 {
        let dx = angle_delta(self.kx, other.kx);
        let dy = angle_delta(self.ky, other.ky);
        dx.hypot(dy)
    }

    /// Minimal-image displacement from `self` to `other`.
    pub fn displacement_to(&self, other: &MomentumPoint) -> (f64, f64) {
        (angle_delta(self.kx, other.kx), angle_delta(self.ky, other.ky))
    }

    pub fn lifted(&self) -> Lifted {
        Lifted::new(self.kx, self.ky)
    }
}

impl fmt::Display for MomentumPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.kx, self.ky)
    }
}

/// Unreduced momentum coordinates, used for paths that cross the zone boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lifted {
    pub kx: f64,
    pub ky: f64,
}

impl Lifted {
    pub fn new(kx: f64, ky: f64) -> Self {
        Lifted { kx, ky }
    }

    pub fn reduce(&self) -> MomentumPoint {
        MomentumPoint::new(self.kx, self.ky)
    }

    pub fn lerp(&self, other: &Lifted, t: f64) -> Lifted {
        Lifted::new(
            self.kx + t * (other.kx - self.kx),
            self.ky + t * (other.ky - self.ky),
        )
    }

    pub fn midpoint(&self, other: &Lifted) -> Lifted {
        self.lerp(other, 0.5)
    }

    /// Plain Euclidean distance in the covering plane.
    pub fn distance(&self, other: &Lifted) -> f64 {
        (other.kx - self.kx).hypot(other.ky - self.ky)
    }
}

/// One Bloch-sum term `A_R exp(i k·R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingTerm {
    pub displacement: (i32, i32),
    pub amplitude: CMatrix,
}

impl HoppingTerm {
    pub fn new(displacement: (i32, i32), amplitude: CMatrix) -> Self {
        HoppingTerm {
            displacement,
            amplitude,
        }
    }
}

/// Closed-form two-band models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Non-contractible Fermi arc along `ky` that snaps open for `delta != 0`.
    FermiArc { delta: f64 },
    /// The four-state Fermi-cut family; `a, b ∈ {0, 1}`.
    FermiCut { a: u8, b: u8 },
    /// `dx = sin kx`, `dz = sin ky + iγ`: eight EP2s for `0 < γ < 1`.
    EpPair { gamma: f64 },
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::FermiArc { .. } => "FA",
            Builtin::FermiCut { .. } => "FC",
            Builtin::EpPair { .. } => "TEST",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Builtin::FermiArc { delta } => vec![delta],
            Builtin::FermiCut { a, b } => vec![a as f64, b as f64],
            Builtin::EpPair { gamma } => vec![gamma],
        }
    }

    /// `[[H11, H12], [H21, H22]]` at a reduced momentum.
    fn entries(&self, kx: f64, ky: f64) -> [[Complex64; 2]; 2] {
        match *self {
            Builtin::FermiArc { delta } => {
                let diag = Complex64::new(delta, 1.0);
                let off = Complex64::new(1.0 - kx.cos(), 0.5);
                [[diag, off], [off, -diag]]
            }
            Builtin::FermiCut { a, b } => {
                let (a, b) = (a as f64, b as f64);
                let s = b * kx + a * ky;
                let ak = a * kx - b * ky;
                let dz = Complex64::new(3.0 - s.cos() - ak.cos(), 0.0);
                let dx = Complex64::new(s.sin(), -3.0 * (1.0 - s.cos()));
                [[dz, dx], [dx, -dz]]
            }
            Builtin::EpPair { gamma } => {
                let dx = Complex64::new(kx.sin(), 0.0);
                let dz = Complex64::new(ky.sin(), gamma);
                [[dz, dx], [dx, -dz]]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Definition {
    Builtin(Builtin),
    Hoppings(Vec<HoppingTerm>),
    Combination(Vec<(Complex64, BlochModel)>),
    DirectSum(Vec<BlochModel>),
}

/// An immutable Bloch Hamiltonian `H(k)` with a fixed band count.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochModel {
    bands: usize,
    definition: Definition,
}

impl BlochModel {
    pub fn fermi_arc(delta: f64) -> Self {
        BlochModel {
            bands: 2,
            definition: Definition::Builtin(Builtin::FermiArc { delta }),
        }
    }

    pub fn fermi_cut(a: u8, b: u8) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(Error::config(format!(
                "FC parameters must be bits, got ({a}, {b})"
            )));
        }
        Ok(BlochModel {
            bands: 2,
            definition: Definition::Builtin(Builtin::FermiCut { a, b }),
        })
    }

    pub fn ep_pair(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::config(format!(
                "TEST gamma must be finite and non-negative, got {gamma}"
            )));
        }
        Ok(BlochModel {
            bands: 2,
            definition: Definition::Builtin(Builtin::EpPair { gamma }),
        })
    }

    /// Resolves a built-in by its name (`FA`, `FC`, `TEST`).
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        let expect = |n: usize| -> Result<()> {
            if params.len() != n {
                Err(Error::config(format!(
                    "builtin {name} takes {n} parameter(s), got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        match name.to_ascii_uppercase().as_str() {
            "FA" => {
                expect(1)?;
                if !params[0].is_finite() {
                    return Err(Error::config("FA delta must be finite"));
                }
                Ok(BlochModel::fermi_arc(params[0]))
            }
            "FC" => {
                expect(2)?;
                let bit = |x: f64| -> Result<u8> {
                    if x == 0.0 {
                        Ok(0)
                    } else if x == 1.0 {
                        Ok(1)
                    } else {
                        Err(Error::config(format!("FC parameters must be 0 or 1, got {x}")))
                    }
                };
                BlochModel::fermi_cut(bit(params[0])?, bit(params[1])?)
            }
            "TEST" => {
                expect(1)?;
                BlochModel::ep_pair(params[0])
            }
            other => Err(Error::config(format!("unknown builtin model '{other}'"))),
        }
    }

    /// Bloch sum over hopping terms. All amplitudes must be `bands × bands`.
    pub fn from_hoppings(bands: usize, terms: Vec<HoppingTerm>) -> Result<Self> {
        if bands == 0 {
            return Err(Error::config("band count must be positive"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.amplitude.nrows() != bands || t.amplitude.ncols() != bands {
                return Err(Error::config_at(
                    format!("hoppings[{i}]"),
                    format!(
                        "amplitude is {}x{}, expected {bands}x{bands}",
                        t.amplitude.nrows(),
                        t.amplitude.ncols()
                    ),
                ));
            }
        }
        Ok(BlochModel {
            bands,
            definition: Definition::Hoppings(terms),
        })
    }

    /// A momentum-independent model.
    pub fn constant(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::config("constant model needs a square matrix"));
        }
        let n = matrix.nrows();
        BlochModel::from_hoppings(n, vec![HoppingTerm::new((0, 0), matrix)])
    }

    /// `Σ c_i H_i(k)`; all terms must share the band count.
    pub fn linear_combination(terms: Vec<(Complex64, BlochModel)>) -> Result<Self> {
        let bands = match terms.first() {
            Some((_, m)) => m.bands,
            None => return Err(Error::config("empty linear combination")),
        };
        if let Some((_, m)) = terms.iter().find(|(_, m)| m.bands != bands) {
            return Err(Error::config(format!(
                "cannot combine {bands}-band and {}-band models",
                m.bands
            )));
        }
        Ok(BlochModel {
            bands,
            definition: Definition::Combination(terms),
        })
    }

    /// `self + other`.
    pub fn plus(&self, other: &BlochModel) -> Result<Self> {
        BlochModel::linear_combination(vec![
            (Complex64::new(1.0, 0.0), self.clone()),
            (Complex64::new(1.0, 0.0), other.clone()),
        ])
    }

    /// `(1 - t) a + t b`.
    pub fn interpolate(a: &BlochModel, b: &BlochModel, t: f64) -> Result<Self> {
        BlochModel::linear_combination(vec![
            (Complex64::new(1.0 - t, 0.0), a.clone()),
            (Complex64::new(t, 0.0), b.clone()),
        ])
    }

    /// Block-diagonal stacking of independent models.
    pub fn direct_sum(blocks: Vec<BlochModel>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::config("empty direct sum"));
        }
        let bands = blocks.iter().map(|b| b.bands).sum();
        Ok(BlochModel {
            bands,
            definition: Definition::DirectSum(blocks),
        })
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn as_builtin(&self) -> Option<Builtin> {
        match &self.definition {
            Definition::Builtin(b) => Some(*b),
            _ => None,
        }
    }

    /// `H(k)` at the reduced momentum `k`.
    pub fn evaluate(&self, k: MomentumPoint) -> CMatrix {
        let mut out = CMatrix::zeros(self.bands, self.bands);
        self.accumulate(k.kx, k.ky, Complex64::new(1.0, 0.0), &mut out, 0);
        out
    }

    /// The 2×2 entries without allocating; `None` for other band counts.
    pub fn evaluate2(&self, k: MomentumPoint) -> Option<[[Complex64; 2]; 2]> {
        if self.bands != 2 {
            return None;
        }
        if let Definition::Builtin(b) = &self.definition {
            return Some(b.entries(k.kx, k.ky));
        }
        let m = self.evaluate(k);
        Some([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
    }

    fn accumulate(&self, kx: f64, ky: f64, scale: Complex64, out: &mut CMatrix, at: usize) {
        match &self.definition {
            Definition::Builtin(b) => {
                let e = b.entries(kx, ky);
                for (r, row) in e.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        out[(at + r, at + c)] += scale * v;
                    }
                }
            }
            Definition::Hoppings(terms) => {
                for t in terms {
                    let (rx, ry) = t.displacement;
                    let phase = kx * rx as f64 + ky * ry as f64;
                    let f = scale * Complex64::new(phase.cos(), phase.sin());
                    for r in 0..self.bands {
                        for c in 0..self.bands {
                            out[(at + r, at + c)] += f * t.amplitude[(r, c)];
                        }
                    }
                }
            }
            Definition::Combination(terms) => {
                for (c, m) in terms {
                    m.accumulate(kx, ky, scale * c, out, at);
                }
            }
            Definition::DirectSum(blocks) => {
                let mut offset = at;
                for b in blocks {
                    b.accumulate(kx, ky, scale, out, offset);
                    offset += b.bands;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

/// On-disk model description (TOML).
///
/// ```toml
/// bands = 2
/// [builtin]
/// name = "FC"
/// params = [1, 0]
/// ```
///
/// or a Bloch sum:
///
/// ```toml
/// bands = 2
/// [[hoppings]]
/// R = [0, 0]
/// re = [[1, 0], [0, -1]]
/// im = [[0, 0], [0, 0]]
/// ```
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<BuiltinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hoppings: Option<Vec<HoppingConfig>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BuiltinConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HoppingConfig {
    #[serde(rename = "R")]
    pub displacement: [i32; 2],
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl ModelConfig {
    pub fn to_model(&self) -> Result<BlochModel> {
        match (&self.builtin, &self.hoppings) {
            (Some(_), Some(_)) => Err(Error::config(
                "model config must give either `builtin` or `hoppings`, not both",
            )),
            (None, None) => Err(Error::config(
                "model config must give `builtin` or `hoppings`",
            )),
            (Some(b), None) => {
                let model = BlochModel::builtin(&b.name, &b.params)
                    .map_err(|e| relocate(e, "builtin"))?;
                if let Some(n) = self.bands {
                    if n != model.bands() {
                        return Err(Error::config_at(
                            "bands",
                            format!("builtin {} has 2 bands, config says {n}", b.name),
                        ));
                    }
                }
                Ok(model)
            }
            (None, Some(hops)) => {
                let bands = match (self.bands, hops.first()) {
                    (Some(n), _) => n,
                    (None, Some(h)) => h.re.len(),
                    (None, None) => {
                        return Err(Error::config_at(
                            "bands",
                            "empty hopping list needs an explicit band count",
                        ))
                    }
                };
                let mut terms = Vec::with_capacity(hops.len());
                for (i, h) in hops.iter().enumerate() {
                    let loc = format!("hoppings[{i}]");
                    let re = square(&h.re, bands).map_err(|m| Error::config_at(format!("{loc}.re"), m))?;
                    let im = match &h.im {
                        Some(im) => Some(
                            square(im, bands).map_err(|m| Error::config_at(format!("{loc}.im"), m))?,
                        ),
                        None => None,
                    };
                    let amp = CMatrix::from_fn(bands, bands, |r, c| {
                        Complex64::new(re[r][c], im.as_ref().map_or(0.0, |m| m[r][c]))
                    });
                    terms.push(HoppingTerm::new(
                        (h.displacement[0], h.displacement[1]),
                        amp,
                    ));
                }
                BlochModel::from_hoppings(bands, terms)
            }
        }
    }
}

fn relocate(e: Error, location: &str) -> Error {
    match e {
        Error::Config {
            message,
            location: None,
        } => Error::config_at(location, message),
        other => other,
    }
}

fn square(rows: &[Vec<f64>], n: usize) -> std::result::Result<Vec<Vec<f64>>, String> {
    if rows.len() != n {
        return Err(format!("expected {n} rows, got {}", rows.len()));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(format!(
                "row {r} has {} entries, expected {n} (amplitudes must be square)",
                row.len()
            ));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(format!("row {r} contains a non-finite entry"));
        }
    }
    Ok(rows.to_vec())
}

/// Parses a TOML model description.
pub fn parse_model(text: &str) -> Result<BlochModel> {
    let cfg: ModelConfig = toml::from_str(text).map_err(|e| {
        let location = e.span().map(|s| {
            let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}")
        });
        Error::Config {
            message: e.message().to_string(),
            location,
        }
    })?;
    cfg.to_model()
}

pub fn load_model(path: &Path) -> Result<BlochModel> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config_at(path.display().to_string(), format!("cannot read model file: {e}"))
    })?;
    parse_model(&text).map_err(|e| match e {
        Error::Config { message, location } => Error::config_at(
            match location {
                Some(l) => format!("{}:{l}", path.display()),
                None => path.display().to_string(),
            },
            message,
        ),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn wrap_and_delta() {
        assert_eq!(wrap_angle(TAU), 0.0);
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert!((wrap_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((angle_delta(0.1, TAU - 0.1) + 0.2).abs() < 1e-15);
        let p = MomentumPoint::new(0.05, 3.0);
        let q = MomentumPoint::new(TAU - 0.05, 3.0);
        assert!((p.distance(&q) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn fc_trivial_state_is_constant() {
        let m = BlochModel::fermi_cut(0, 0).unwrap();
        for &(kx, ky) in &[(0.0, 0.0), (1.3, 4.1), (5.9, 0.2)] {
            let h = m.evaluate(MomentumPoint::new(kx, ky));
            assert!(close(h[(0, 0)], c(1.0, 0.0)));
            assert!(close(h[(1, 1)], c(-1.0, 0.0)));
            assert!(close(h[(0, 1)], c(0.0, 0.0)));
            assert!(close(h[(1, 0)], c(0.0, 0.0)));
        }
    }

    #[test]
    fn fa_entries() {
        let h = BlochModel::fermi_arc(0.0).evaluate(MomentumPoint::new(0.0, 0.0));
        assert!(close(h[(0, 0)], c(0.0, 1.0)));
        assert!(close(h[(0, 1)], c(0.0, 0.5)));
        assert!(close(h[(1, 0)], c(0.0, 0.5)));
        assert!(close(h[(1, 1)], c(0.0, -1.0)));

        let h = BlochModel::fermi_arc(0.3).evaluate(MomentumPoint::new(PI, 0.0));
        assert!(close(h[(0, 0)], c(0.3, 1.0)));
        assert!(close(h[(0, 1)], c(2.0, 0.5)));
        assert!(close(h[(1, 0)], c(2.0, 0.5)));
        assert!(close(h[(1, 1)], c(-0.3, -1.0)));
    }

    #[test]
    fn empty_and_constant_hoppings() {
        let m = BlochModel::from_hoppings(2, vec![]).unwrap();
        assert_eq!(m.evaluate(MomentumPoint::new(1.0, 2.0)), CMatrix::zeros(2, 2));

        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(4.0, 4.0)]);
        let m = BlochModel::from_hoppings(2, vec![HoppingTerm::new((0, 0), a.clone())]).unwrap();
        assert_eq!(m.evaluate(MomentumPoint::new(2.2, 5.1)), a);
    }

    #[test]
    fn mismatched_amplitude_is_config_error() {
        let err = BlochModel::from_hoppings(2, vec![HoppingTerm::new((1, 0), CMatrix::zeros(3, 3))])
            .unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        assert!(err.to_string().contains("hoppings[0]"));
    }

    #[test]
    fn fc_rejects_non_bits() {
        assert!(BlochModel::fermi_cut(2, 0).is_err());
        assert!(BlochModel::builtin("FC", &[0.5, 1.0]).is_err());
        assert!(BlochModel::builtin("FC", &[1.0]).is_err());
        assert!(BlochModel::builtin("nope", &[]).is_err());
        assert!(BlochModel::ep_pair(-0.1).is_err());
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let fc = BlochModel::fermi_cut(1, 0).unwrap();
        let five = BlochModel::constant(CMatrix::from_element(1, 1, c(5.0, 0.0))).unwrap();
        let m = BlochModel::direct_sum(vec![fc.clone(), five]).unwrap();
        assert_eq!(m.bands(), 3);
        let k = MomentumPoint::new(0.7, 2.9);
        let h = m.evaluate(k);
        let h2 = fc.evaluate(k);
        for r in 0..2 {
            for cc in 0..2 {
                assert_eq!(h[(r, cc)], h2[(r, cc)]);
            }
            assert_eq!(h[(r, 2)], c(0.0, 0.0));
            assert_eq!(h[(2, r)], c(0.0, 0.0));
        }
        assert_eq!(h[(2, 2)], c(5.0, 0.0));
    }

    #[test]
    fn parse_builtin_and_hoppings() {
        let m = parse_model("[builtin]\nname = \"FC\"\nparams = [1, 1]\n").unwrap();
        assert_eq!(m, BlochModel::fermi_cut(1, 1).unwrap());

        let text = r#"
bands = 2
[[hoppings]]
R = [0, 0]
re = [[1, 0], [0, -1]]
[[hoppings]]
R = [1, 0]
re = [[0, 0.5], [0.5, 0]]
im = [[0, 0], [0, 0]]
"#;
        let m = parse_model(text).unwrap();
        let h = m.evaluate(MomentumPoint::new(PI / 2.0, 0.0));
        assert!(close(h[(0, 1)], c(0.0, 0.5)));
        assert!(close(h[(0, 0)], c(1.0, 0.0)));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_model("[builtin]\nname = \"XX\"\n").unwrap_err();
        assert!(err.to_string().contains("builtin"), "{err}");

        let text = "bands = 2\n[[hoppings]]\nR = [0, 0]\nre = [[1, 0, 0], [0, 1, 0]]\n";
        let err = parse_model(text).unwrap_err();
        assert!(err.to_string().contains("hoppings[0].re"), "{err}");

        let err = parse_model("bands = 2\nfoo = 1\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");

        let text = "bands = 3\n[[hoppings]]\nR = [0, 0]\nre = [[1, 0], [0, 1]]\n";
        assert!(parse_model(text).is_err());
    }
}
