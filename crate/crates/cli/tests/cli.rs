mod common;

use std::f64::consts::PI;
use std::fs;

use common::{nhtopo, stderr, stdout};
use nhtopo::io::{from_json, parse_contours_csv, parse_eps_csv, parse_intervals_csv, parse_mesh};
use nhtopo::scan::{SweepResult, ThreadingReport};
use nhtopo::topology::invariants::InvariantReport;
use nhtopo::{BraidWord, EpCensus, MomentumPoint};

fn code(o: &std::process::Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn classify_reports_fermi_cut_classes() {
    let dir = tempfile::tempdir().unwrap();
    for (params, label) in [("0,0", "(0,0)"), ("1,0", "(0,1)"), ("0,1", "(1,0)"), ("1,1", "(1,1)")] {
        let o = nhtopo(dir.path(), &["classify", "--builtin", "FC", "--params", params, "--grid", "64x64"], None);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), format!("class={label} ground_state=true eps=0"));
        let report: InvariantReport =
            from_json("invariant-report", &fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(report.bands, 2);
        assert!(report.ground_state);
    }
    let o = nhtopo(dir.path(), &["classify", "--builtin", "TEST", "--params", "0.5", "--grid", "64x64"], None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "class=undefined ground_state=false eps=8");
}

#[test]
fn eps_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = nhtopo(dir.path(), &["eps", "--builtin", "TEST", "--params", "0.5", "--grid", "64x64"], None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "eps=8 total_charge=0");
    let rows = parse_eps_csv(&fs::read_to_string(dir.path().join("eps.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(r.charge.unwrap().abs(), 0.5);
        assert!(r.residual < 1e-10);
        let s = r.kx.sin();
        assert!((s.abs() - 0.5).abs() < 1e-8 && r.ky.sin().abs() < 1e-8);
    }

    let o = nhtopo(dir.path(), &["eps", "--builtin", "TEST", "--params", "0.5", "--grid", "64x64", "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let census: EpCensus = from_json("ep-census", &fs::read_to_string(dir.path().join("eps.json")).unwrap()).unwrap();
    assert_eq!(census.len(), 8);
    for (row, ep) in rows.iter().zip(&census.eps) {
        assert_eq!((row.kx, row.ky), (ep.location.kx(), ep.location.ky()));
    }
}

#[test]
fn arcs_reports_the_snapping_arc() {
    let dir = tempfile::tempdir().unwrap();
    let o = nhtopo(dir.path(), &["arcs", "--builtin", "FA", "--params", "0", "--kind", "real"], None);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("contours=1\n"));
    assert!(out.contains("kind=real closed=true winding=(0,1) contractible=false"));
    let rows = parse_contours_csv(&fs::read_to_string(dir.path().join("contours.csv")).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.contour == 0 && (r.wx, r.wy) == (0, 1)));

    let o = nhtopo(dir.path(), &["arcs", "--builtin", "FA", "--params", "0.1"], None);
    assert_eq!(stdout(&o).trim(), "contours=0");
}

#[test]
fn braid_words_on_fermi_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let o = nhtopo(dir.path(), &["braid", "--builtin", "FC", "--params", "1,1", "--offset", "2.0", "--format", "json"], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("word=s1^-1 length=1 "));
    let word: BraidWord = from_json("braid-word", &fs::read_to_string(dir.path().join("braid.json")).unwrap()).unwrap();
    assert_eq!(word.generators, vec![-1]);
    assert_eq!(word.induced_permutation(), word.monodromy);

    let o = nhtopo(dir.path(), &["braid", "--builtin", "FC", "--params", "0,0", "--axis", "y"], None);
    assert!(stdout(&o).starts_with("word=e length=0 "));
    assert_eq!(fs::read_to_string(dir.path().join("braid.csv")).unwrap(), "position,generator\n");
}

#[test]
fn scan_writes_tables_and_threading() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "scan", "--builtin", "FC", "--params", "0,0", "--to-builtin", "FC", "--to-params", "1,0", "--grid", "64x64",
        "--t-count", "32",
    ];
    let o = nhtopo(dir.path(), &args, None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("flipped_bits=1"), "{out}");
    let intervals = parse_intervals_csv(&fs::read_to_string(dir.path().join("sweep_intervals.csv")).unwrap()).unwrap();
    assert!(intervals.len() >= 2);
    let threading: ThreadingReport =
        from_json("threading", &fs::read_to_string(dir.path().join("threading.json")).unwrap()).unwrap();
    assert_eq!(threading.total_flipped_bits, 1);

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert_eq!(code(&nhtopo(dir.path(), &json_args, None)), 0);
    let sweep: SweepResult = from_json("sweep", &fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(sweep.epfree_intervals.len(), out.lines().filter(|l| l.starts_with("interval ")).count());
}

#[test]
fn surface_meshes_are_continuous_off_the_cut() {
    let dir = tempfile::tempdir().unwrap();
    let o = nhtopo(dir.path(), &["surface", "--builtin", "FC", "--params", "1,0", "--grid", "64x64"], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "sheets=2 flagged_vertices=0 cuts=1");
    let cuts = fs::read_to_string(dir.path().join("cuts.txt")).unwrap();
    assert!(cuts.starts_with("# contour 0 kind real closed true winding 1 0 bands 0 1\n"));
    for s in 0..2 {
        let mesh = parse_mesh(&fs::read_to_string(dir.path().join(format!("sheet_{s}.mesh"))).unwrap()).unwrap();
        assert_eq!((mesh.sheet, mesh.nx, mesh.ny), (s, 64, 64));
        for j in 0..=mesh.ny {
            let ky = mesh.vertex(0, j).ky;
            if MomentumPoint::new(0.0, ky).distance(&MomentumPoint::new(0.0, PI)) < 1e-9 {
                continue;
            }
            for i in 0..mesh.nx {
                let jump = (mesh.vertex(i + 1, j).value - mesh.vertex(i, j).value).norm();
                assert!(jump < 0.5, "sheet {s} row {j} col {i}: {jump}");
            }
        }
        // no face straddles the cut
        assert!(mesh.faces.len() < mesh.nx * mesh.ny);
    }
}

#[test]
fn model_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.toml");
    fs::write(&path, "bands = 2\n[[hoppings]]\nR = [0, 0]\nre = [[1, 0], [0, -1]]\n").unwrap();
    let o = nhtopo(dir.path(), &["classify", "--model", path.to_str().unwrap(), "--grid", "32x32"], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "class=(0,0) ground_state=true eps=0");
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["classify", "--model", missing.to_str().unwrap()], 2, "[configuration]"),
        (vec!["classify", "--builtin", "FC", "--params", "0.5,1"], 2, "[configuration]"),
        (vec!["classify", "--builtin", "XYZ"], 2, "[configuration]"),
        (vec!["eps", "--builtin", "TEST", "--params", "0.5", "--grid", "8x8"], 2, ""),
        (vec!["classify", "--builtin", "FC", "--params", "1,1", "--offset", "1,2,3"], 2, "[configuration]"),
        (vec!["scan", "--builtin", "FC", "--params", "0,0", "--to-builtin", "FC", "--to-params", "1,0", "--t-count", "4"], 2, "[configuration]"),
        (vec!["bogus"], 2, ""),
    ];
    for (args, expect, tag) in cases {
        let o = nhtopo(dir.path(), &args, None);
        assert_eq!(code(&o), expect, "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(tag), "{args:?}: {}", stderr(&o));
    }

    let o = nhtopo(dir.path(), &["classify", "--builtin", "FC", "--params", "1,1"], Some(0));
    assert_eq!(code(&o), 2);

    // a loop through an EP of TEST(0.5) cannot be tracked
    let o = nhtopo(dir.path(), &["braid", "--builtin", "TEST", "--params", "0.5", "--offset", "0", "--axis", "x"], None);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("nhtopo: [degeneracy]"));

    let file = dir.path().join("file");
    fs::write(&file, "").unwrap();
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_nhtopo"))
        .args(["classify", "--builtin", "FC", "--params", "1,1", "--grid", "16x16", "--out"])
        .arg(file.join("sub"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 6, "{}", stderr(&o));
}
