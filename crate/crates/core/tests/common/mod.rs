#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use nhtopo::{BlochModel, HoppingTerm};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random hoppings over displacements in `{-1, 0, 1}²` whose Bloch sum has
/// every entry bounded by `sup` in modulus at every k.
pub fn random_trig(rng: &mut impl Rng, bands: usize, sup: f64) -> BlochModel {
    let shifts: Vec<(i32, i32)> = (-1..=1).flat_map(|x| (-1..=1).map(move |y| (x, y))).collect();
    let mut raw: Vec<DMatrix<Complex64>> = shifts
        .iter()
        .map(|_| DMatrix::from_fn(bands, bands, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    // entrywise l1 bound over the terms
    let mut worst: f64 = 0.0;
    for i in 0..bands {
        for j in 0..bands {
            worst = worst.max(raw.iter().map(|m| m[(i, j)].norm()).sum());
        }
    }
    let scale = sup / worst;
    for m in &mut raw {
        *m *= c(scale, 0.0);
    }
    let terms = shifts.into_iter().zip(raw).map(|(r, a)| HoppingTerm::new(r, a)).collect();
    BlochModel::from_hoppings(bands, terms).unwrap()
}

/// `(H11 − H22)²/4 + H12·H21`, computed directly from the matrix.
pub fn disc(m: &DMatrix<Complex64>) -> Complex64 {
    let h = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    h * h + m[(0, 1)] * m[(1, 0)]
}

/// Accumulated phase of `f` along a closed parameterisation, in units of 2π.
pub fn phase_winding(samples: usize, f: impl Fn(f64) -> Complex64) -> f64 {
    let mut total = 0.0;
    let mut prev = f(0.0);
    for i in 1..=samples {
        let z = f(i as f64 / samples as f64);
        total += (z / prev).arg();
        prev = z;
    }
    total / std::f64::consts::TAU
}
