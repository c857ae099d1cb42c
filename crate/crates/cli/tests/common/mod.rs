#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

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

/// Runs the binary in `dir` with an optional worker-count override.
pub fn nhtopo(dir: &Path, args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nhtopo"));
    cmd.args(args).arg("--out").arg(dir).env_remove("NHTOPO_THREADS");
    if let Some(n) = threads {
        cmd.env("NHTOPO_THREADS", n.to_string());
    }
    cmd.output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}
