mod common;

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{c, random_trig};
use nhtopo::model::parse_model;
use nhtopo::{BlochModel, Error, HoppingTerm, MomentumPoint};

fn close(a: &DMatrix<num_complex::Complex64>, b: &DMatrix<num_complex::Complex64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

fn fa_by_hand(delta: f64, kx: f64) -> DMatrix<num_complex::Complex64> {
    let off = c(1.0 - kx.cos(), 0.5);
    DMatrix::from_row_slice(2, 2, &[c(delta, 1.0), off, off, c(-delta, -1.0)])
}

fn fc_by_hand(a: f64, b: f64, kx: f64, ky: f64) -> DMatrix<num_complex::Complex64> {
    let s = b * kx + a * ky;
    let ak = a * kx - b * ky;
    let dz = c(3.0 - s.cos() - ak.cos(), 0.0);
    let dx = c(s.sin(), -3.0 * (1.0 - s.cos()));
    DMatrix::from_row_slice(2, 2, &[dz, dx, dx, -dz])
}

#[test]
fn builtins_match_hand_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let kx = rng.gen_range(0.0..TAU);
        let ky = rng.gen_range(0.0..TAU);
        let k = MomentumPoint::new(kx, ky);
        let delta = rng.gen_range(-1.0..1.0);
        assert!(close(&BlochModel::fermi_arc(delta).evaluate(k), &fa_by_hand(delta, kx), 1e-12));
        for (a, b) in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
            let m = BlochModel::fermi_cut(a, b).unwrap().evaluate(k);
            assert!(close(&m, &fc_by_hand(a as f64, b as f64, kx, ky), 1e-12));
        }
    }
}

#[test]
fn documented_values() {
    let fa0 = BlochModel::fermi_arc(0.0).evaluate(MomentumPoint::new(0.0, 0.0));
    let expect = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.5), c(0.0, 0.5), c(0.0, -1.0)]);
    assert!(close(&fa0, &expect, 1e-15));

    let fa = BlochModel::fermi_arc(0.3).evaluate(MomentumPoint::new(PI, 0.0));
    let expect = DMatrix::from_row_slice(2, 2, &[c(0.3, 1.0), c(2.0, 0.5), c(2.0, 0.5), c(-0.3, -1.0)]);
    assert!(close(&fa, &expect, 1e-15));

    let fc = BlochModel::fermi_cut(0, 0).unwrap().evaluate(MomentumPoint::new(1.2, 4.4));
    let expect = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    assert!(close(&fc, &expect, 1e-15));

    let t = BlochModel::ep_pair(0.5).unwrap().evaluate(MomentumPoint::new(PI / 2.0, PI / 2.0));
    let d = common::disc(&t);
    assert!((d - c(1.75, 1.0)).norm() < 1e-14);
}

#[test]
fn hopping_sums() {
    let empty = BlochModel::from_hoppings(2, vec![]).unwrap();
    assert!(empty.evaluate(MomentumPoint::new(0.4, 2.0)).iter().all(|z| z.norm() == 0.0));

    let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(0.5, 0.5)]);
    let constant = BlochModel::from_hoppings(2, vec![HoppingTerm::new((0, 0), m.clone())]).unwrap();
    assert_eq!(constant.evaluate(MomentumPoint::new(5.0, 1.0)), m);

    // A e^{i kx} with A = 1: entry equals (cos kx, sin kx)
    let one = DMatrix::from_element(1, 1, c(1.0, 0.0));
    let wave = BlochModel::from_hoppings(1, vec![HoppingTerm::new((1, 0), one)]).unwrap();
    let z = wave.evaluate(MomentumPoint::new(0.7, 0.0))[(0, 0)];
    assert!((z - c(0.7f64.cos(), 0.7f64.sin())).norm() < 1e-15);
}

#[test]
fn hermitian_ingestion_sanity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut terms = Vec::new();
        for r in [(0, 0), (1, 0), (0, 1), (1, -1)] {
            let a = DMatrix::from_fn(3, 3, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            if r == (0, 0) {
                let h = (&a + a.adjoint()) * c(0.5, 0.0);
                terms.push(HoppingTerm::new(r, h));
            } else {
                terms.push(HoppingTerm::new((-r.0, -r.1), a.adjoint()));
                terms.push(HoppingTerm::new(r, a));
            }
        }
        let model = BlochModel::from_hoppings(3, terms).unwrap();
        for _ in 0..10 {
            let h = model.evaluate(MomentumPoint::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)));
            assert!(close(&h, &h.adjoint(), 1e-12));
        }
    }
}

#[test]
fn config_errors_are_configuration_errors() {
    let cases = [
        "bands = 2\n[builtin]\nname = \"XYZ\"\nparams = []\n",
        "bands = 2\n[[hoppings]]\nR = [0, 0]\nre = [[1, 0, 0], [0, 1, 0]]\n",
        "bands = 3\n[[hoppings]]\nR = [0, 0]\nre = [[1, 0], [0, 1]]\n",
        "bands = 2\nsurprise = 1\n",
        "[builtin]\nname = \"FC\"\nparams = [0.5, 1]\n",
    ];
    for text in cases {
        match parse_model(text) {
            Err(Error::Config { .. }) => {}
            other => panic!("{text:?} gave {other:?}"),
        }
    }
    let ok = parse_model("[builtin]\nname = \"TEST\"\nparams = [0.5]\n").unwrap();
    assert_eq!(ok.bands(), 2);
}

proptest! {
    #[test]
    fn evaluation_is_periodic(seed in any::<u64>(), kx in -10.0f64..10.0, ky in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let models = [
            random_trig(&mut rng, 2, 1.0),
            random_trig(&mut rng, 3, 1.0),
            BlochModel::fermi_arc(0.2),
            BlochModel::fermi_cut(1, 1).unwrap(),
            BlochModel::ep_pair(0.5).unwrap(),
        ];
        for m in &models {
            let h = m.evaluate(MomentumPoint::new(kx, ky));
            prop_assert!(close(&h, &m.evaluate(MomentumPoint::new(kx + TAU, ky)), 1e-12));
            prop_assert!(close(&h, &m.evaluate(MomentumPoint::new(kx, ky + TAU)), 1e-12));
        }
    }

    #[test]
    fn momentum_points_are_reduced(kx in -100.0f64..100.0, ky in -100.0f64..100.0) {
        let p = MomentumPoint::new(kx, ky);
        prop_assert!((0.0..TAU).contains(&p.kx()) && (0.0..TAU).contains(&p.ky()));
        let q = MomentumPoint::new(kx + 3.0 * TAU, ky - TAU);
        prop_assert!(p.distance(&q) < 1e-9);
    }
}
