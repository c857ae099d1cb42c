//! `nhtopo`: command-line front end for the spectral topology library.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nhtopo::io::{self, fmt_f64};
use nhtopo::model::load_model;
use nhtopo::scan::{self, ModelFamily, SweepOptions};
use nhtopo::spectral::LoopOptions;
use nhtopo::surface::{sample_surface_with, SurfaceOptions};
use nhtopo::topology::braid::braid_word;
use nhtopo::topology::contours::{degeneracy_contours_with, ContourOptions};
use nhtopo::topology::eps::{locate_eps_with, EpSearchOptions};
use nhtopo::topology::invariants::{invariants_with, InvariantOptions};
use nhtopo::{classify, Axis, BlochModel, ContourKind, Error, Result};

#[derive(Parser)]
#[command(name = "nhtopo", version, about = "Topology of non-Hermitian Bloch spectra on the Brillouin-zone torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monodromy invariants and classification; writes report.json.
    Classify(Common),
    /// Exceptional points with their charges; writes eps.csv|json.
    Eps(Common),
    /// Real- and imaginary-part degeneracy contours; writes contours.csv|json.
    Arcs {
        #[command(flatten)]
        common: Common,
        /// Contour kind to extract.
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
    },
    /// Eigenvalue braid word along one loop; writes braid.csv|json.
    Braid(Common),
    /// Parameter sweep between two models; writes sweep tables and threading.json.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Per-sheet meshes sheet_<s>.mesh and cut polylines cuts.txt.
    Surface(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Builtin model: FA (delta), FC (a,b), TEST (gamma).
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    builtin: Option<String>,
    /// Comma-separated builtin parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "builtin")]
    params: Vec<f64>,
    /// TOML model file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Sampling grid, at least 16x16.
    #[arg(long, default_value = "128x128", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Samples per loop, at least 16.
    #[arg(long, default_value_t = 512, value_parser = parse_samples)]
    samples: usize,
    /// Loop offset. `classify` takes `KX,KY` as the common loop base point
    /// (a single value is used for both); `braid` uses the first value.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,0.7")]
    offset: Vec<f64>,
    /// Loop direction for `braid`.
    #[arg(long, default_value = "x", value_parser = parse_axis)]
    axis: Axis,
    /// Relative residual below which a refined degeneracy is accepted.
    #[arg(long, default_value_t = 1e-10, value_parser = parse_positive)]
    tol_ep: f64,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Clone)]
struct ScanArgs {
    /// End-point builtin of a linear family.
    #[arg(long, conflicts_with = "to_model")]
    to_builtin: Option<String>,
    /// End-point parameters (for a linear family or a builtin parameter sweep).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    to_params: Vec<f64>,
    /// End-point model file of a linear family.
    #[arg(long)]
    to_model: Option<PathBuf>,
    /// Family type: entrywise interpolation or a builtin parameter sweep.
    #[arg(long, value_enum, default_value_t = FamilyArg::Linear)]
    family: FamilyArg,
    /// Base t samples, at least 8.
    #[arg(long, default_value_t = 64)]
    t_count: usize,
    /// Drop the default 0.1i off-diagonal perturbation of linear families.
    #[arg(long)]
    no_perturbation: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum KindArg {
    Real,
    Imaginary,
    Both,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum FamilyArg {
    Linear,
    Builtin,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid must be WxH, got '{s}'"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad grid width '{w}'"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad grid height '{h}'"))?;
    if w < 16 || h < 16 {
        return Err(format!("grid must be at least 16x16, got {w}x{h}"));
    }
    Ok((w, h))
}

fn parse_samples(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("bad sample count '{s}'"))?;
    if n < 16 {
        return Err(format!("at least 16 samples are required, got {n}"));
    }
    Ok(n)
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("bad number '{s}'"))?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(format!("tolerance must be positive, got {x}"));
    }
    Ok(x)
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    s.parse::<Axis>().map_err(|e| e.to_string())
}

impl Common {
    fn model(&self) -> Result<BlochModel> {
        match (&self.builtin, &self.model) {
            (Some(name), _) => BlochModel::builtin(name, &self.params),
            (None, Some(path)) => load_model(path),
            (None, None) => Err(Error::config("either --builtin or --model is required")),
        }
    }

    fn eps_options(&self) -> EpSearchOptions {
        EpSearchOptions {
            tolerance: self.tol_ep,
            ..EpSearchOptions::default()
        }
    }

    fn loops(&self) -> LoopOptions {
        LoopOptions::with_samples(self.samples)
    }

    fn base(&self) -> Result<(f64, f64)> {
        match self.offset.as_slice() {
            [a] => Ok((*a, *a)),
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::config("--offset takes one or two values")),
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        fs::write(&path, contents)?;
        Ok(path)
    }
}

fn cmd_classify(c: &Common) -> Result<()> {
    let model = c.model()?;
    let opts = InvariantOptions {
        grid: c.grid,
        loops: c.loops(),
        eps: c.eps_options(),
    };
    let report = invariants_with(&model, c.base()?, &opts)?;
    let class = classify(&report);
    c.write("report.json", &io::to_json("invariant-report", &report)?)?;
    let label = match report.class_label {
        Some((x, y)) => format!("({x},{y})"),
        None if report.ground_state => class.label(),
        None => "undefined".to_string(),
    };
    println!(
        "class={label} ground_state={} eps={}",
        report.ground_state,
        report.eps.len()
    );
    Ok(())
}

fn cmd_eps(c: &Common) -> Result<()> {
    let model = c.model()?;
    let census = locate_eps_with(&model, c.grid, &c.eps_options())?;
    match c.format {
        Format::Csv => c.write("eps.csv", &io::eps_csv(&census.eps)?)?,
        Format::Json => c.write("eps.json", &io::to_json("ep-census", &census)?)?,
    };
    for a in &census.advisories {
        eprintln!("advisory: {a}");
    }
    let charge = census
        .total_charge()
        .map_or("unavailable".to_string(), |q| q.to_string());
    println!("eps={} total_charge={charge}", census.len());
    Ok(())
}

fn cmd_arcs(c: &Common, kind: KindArg) -> Result<()> {
    let model = c.model()?;
    let opts = ContourOptions {
        eps: c.eps_options(),
        ..ContourOptions::default()
    };
    let kinds: &[ContourKind] = match kind {
        KindArg::Real => &[ContourKind::Real],
        KindArg::Imaginary => &[ContourKind::Imaginary],
        KindArg::Both => &[ContourKind::Real, ContourKind::Imaginary],
    };
    let mut all = Vec::new();
    for &k in kinds {
        all.extend(degeneracy_contours_with(&model, k, c.grid, &opts)?);
    }
    match c.format {
        Format::Csv => c.write("contours.csv", &io::contours_csv(&all)?)?,
        Format::Json => c.write("contours.json", &io::to_json("contours", &all)?)?,
    };
    println!("contours={}", all.len());
    for (i, d) in all.iter().enumerate() {
        println!(
            "contour {i} kind={} closed={} winding=({},{}) contractible={} vertices={}",
            d.kind.name(),
            d.closed,
            d.homotopy_class.0,
            d.homotopy_class.1,
            d.contractible,
            d.polyline.len()
        );
    }
    Ok(())
}

fn cmd_braid(c: &Common) -> Result<()> {
    let model = c.model()?;
    let offset = c.offset[0];
    let word = braid_word(&model, c.axis, offset, &c.loops())?;
    match c.format {
        Format::Csv => {
            let mut text = String::from("position,generator\n");
            for (i, g) in word.generators.iter().enumerate() {
                text.push_str(&format!("{i},{g}\n"));
            }
            c.write("braid.csv", &text)?
        }
        Format::Json => c.write("braid.json", &io::to_json("braid-word", &word)?)?,
    };
    println!(
        "word={} length={} permutation={} monodromy={}",
        word,
        word.len(),
        word.induced_permutation(),
        word.monodromy
    );
    Ok(())
}

fn cmd_scan(c: &Common, s: &ScanArgs) -> Result<()> {
    let start = c.model()?;
    let family = match s.family {
        FamilyArg::Builtin => {
            let name = c
                .builtin
                .as_deref()
                .ok_or_else(|| Error::config("a builtin sweep needs --builtin"))?;
            ModelFamily::builtin(name, c.params.clone(), s.to_params.clone())?
        }
        FamilyArg::Linear => {
            let end = match (&s.to_builtin, &s.to_model) {
                (Some(name), _) => BlochModel::builtin(name, &s.to_params)?,
                (None, Some(path)) => load_model(path)?,
                (None, None) => return Err(Error::config("a linear family needs --to-builtin or --to-model")),
            };
            if s.no_perturbation {
                ModelFamily::linear_with(start, end, None)?
            } else {
                ModelFamily::linear(start, end)?
            }
        }
    };
    let opts = SweepOptions {
        grid: c.grid,
        offsets: c.base()?,
        loops: c.loops(),
        eps: c.eps_options(),
        ..SweepOptions::default()
    };
    let result = scan::sweep_with(&family, s.t_count, &opts)?;
    let threading = scan::threading_report(&result);
    match c.format {
        Format::Csv => {
            let t = io::sweep_tables(&result)?;
            c.write("sweep_eps.csv", &t.eps)?;
            c.write("sweep_tracks.csv", &t.tracks)?;
            c.write("sweep_events.csv", &t.events)?;
            c.write("sweep_intervals.csv", &t.intervals)?;
        }
        Format::Json => {
            c.write("sweep.json", &io::to_json("sweep", &result)?)?;
        }
    }
    c.write("threading.json", &io::to_json("threading", &threading)?)?;
    for a in &result.advisories {
        eprintln!("advisory: {a}");
    }
    let with_eps = result.samples.iter().filter(|x| !x.eps.is_empty()).count();
    println!(
        "samples={} samples_with_eps={} tracks={} events={} epfree_intervals={} flipped_bits={}",
        result.samples.len(),
        with_eps,
        result.ep_tracks.len(),
        result.events.len(),
        result.epfree_intervals.len(),
        threading.total_flipped_bits
    );
    for iv in &result.epfree_intervals {
        let bits: Vec<String> = iv
            .report
            .m_matrix
            .iter()
            .map(|m| format!("{}{}:({},{})", m.p + 1, m.q + 1, m.m_x, m.m_y))
            .collect();
        println!(
            "interval t=[{},{}] {}",
            fmt_f64(iv.t_start),
            fmt_f64(iv.t_end),
            bits.join(" ")
        );
    }
    Ok(())
}

fn cmd_surface(c: &Common) -> Result<()> {
    let model = c.model()?;
    let opts = SurfaceOptions {
        eps: c.eps_options(),
        ..SurfaceOptions::default()
    };
    let meshes = sample_surface_with(&model, c.grid, &opts)?;
    for m in &meshes {
        c.write(&format!("sheet_{}.mesh", m.sheet), &io::mesh_text(m))?;
    }
    let copts = ContourOptions {
        eps: c.eps_options(),
        ..ContourOptions::default()
    };
    let cuts = degeneracy_contours_with(&model, ContourKind::Real, c.grid, &copts)?;
    c.write("cuts.txt", &io::cuts_text(&cuts))?;
    let flagged: usize = meshes.iter().map(|m| m.flagged_count()).sum();
    println!("sheets={} flagged_vertices={} cuts={}", meshes.len(), flagged, cuts.len());
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NHTOPO_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::config(format!("NHTOPO_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config(format!("cannot configure the worker pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Classify(c) => cmd_classify(c),
        Command::Eps(c) => cmd_eps(c),
        Command::Arcs { common, kind } => cmd_arcs(common, *kind),
        Command::Braid(c) => cmd_braid(c),
        Command::Scan { common, scan } => cmd_scan(common, scan),
        Command::Surface(c) => cmd_surface(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = e.category();
            eprintln!("nhtopo: [{}] {e}", cat.name());
            ExitCode::from(cat.exit_code() as u8)
        }
    }
}
