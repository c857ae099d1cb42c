//! Data-file formats: CSV tables, JSON documents, sheet meshes and cut
//! polylines. Floats in text tables use 17 significant digits in lowercase
//! scientific notation so that output is reproducible byte for byte.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scan::{EventKind, SweepResult};
use crate::surface::{MeshVertex, SheetMesh};
use crate::topology::contours::{ContourKind, DegeneracyContour};
use crate::topology::eps::ExceptionalPoint;

/// Version tag written into every structured document.
pub const SCHEMA_VERSION: u32 = 1;

/// Fixed float formatting for data files: 17 significant digits, lowercase
/// scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_f64(*x))
}

fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_f64(*v)),
        None => s.serialize_str(""),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let location = e.position().map(|p| format!("line {}", p.line()));
    Error::Config {
        message: format!("malformed table: {e}"),
        location,
    }
}

fn write_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn read_rows<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpRow {
    #[serde(serialize_with = "ser_f64")]
    pub kx: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ky: f64,
    pub order: u32,
    #[serde(serialize_with = "ser_opt_f64")]
    pub charge: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
    pub band_p: usize,
    pub band_q: usize,
}

impl From<&ExceptionalPoint> for EpRow {
    fn from(e: &ExceptionalPoint) -> Self {
        EpRow {
            kx: e.location.kx(),
            ky: e.location.ky(),
            order: e.order,
            charge: e.charge,
            residual: e.residual,
            band_p: e.bands.0,
            band_q: e.bands.1,
        }
    }
}

pub fn eps_csv(eps: &[ExceptionalPoint]) -> Result<String> {
    write_rows(eps.iter().map(EpRow::from))
}

pub fn parse_eps_csv(text: &str) -> Result<Vec<EpRow>> {
    read_rows(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourRow {
    pub contour: usize,
    pub kind: ContourKind,
    pub closed: bool,
    pub contractible: bool,
    pub wx: i32,
    pub wy: i32,
    pub band_p: usize,
    pub band_q: usize,
    pub flagged: bool,
    pub vertex: usize,
    #[serde(serialize_with = "ser_f64")]
    pub kx: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ky: f64,
}

/// One row per polyline vertex (lifted coordinates).
pub fn contours_csv(contours: &[DegeneracyContour]) -> Result<String> {
    write_rows(contours.iter().enumerate().flat_map(|(c, d)| {
        d.polyline.iter().enumerate().map(move |(v, p)| ContourRow {
            contour: c,
            kind: d.kind,
            closed: d.closed,
            contractible: d.contractible,
            wx: d.homotopy_class.0,
            wy: d.homotopy_class.1,
            band_p: d.bands.0,
            band_q: d.bands.1,
            flagged: d.flagged,
            vertex: v,
            kx: p.kx,
            ky: p.ky,
        })
    }))
}

pub fn parse_contours_csv(text: &str) -> Result<Vec<ContourRow>> {
    read_rows(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEpRow {
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    #[serde(serialize_with = "ser_f64")]
    pub kx: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ky: f64,
    pub order: u32,
    #[serde(serialize_with = "ser_opt_f64")]
    pub charge: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackRow {
    pub track: usize,
    #[serde(serialize_with = "ser_opt_f64")]
    pub charge: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    #[serde(serialize_with = "ser_f64")]
    pub kx: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ky: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub kind: EventKind,
    #[serde(serialize_with = "ser_f64")]
    pub t_lo: f64,
    #[serde(serialize_with = "ser_f64")]
    pub t_hi: f64,
    /// Track indices joined by `;`.
    pub tracks: String,
    pub axis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    #[serde(serialize_with = "ser_f64")]
    pub t_start: f64,
    #[serde(serialize_with = "ser_f64")]
    pub t_end: f64,
    pub band_p: usize,
    pub band_q: usize,
    pub m_x: u8,
    pub m_y: u8,
}

/// The four sweep tables: per-t EPs, tracks, events, EP-free intervals.
pub struct SweepTables {
    pub eps: String,
    pub tracks: String,
    pub events: String,
    pub intervals: String,
}

pub fn sweep_tables(r: &SweepResult) -> Result<SweepTables> {
    let eps = write_rows(r.samples.iter().flat_map(|s| {
        s.eps.iter().map(move |e| SweepEpRow {
            t: s.t,
            kx: e.location.kx(),
            ky: e.location.ky(),
            order: e.order,
            charge: e.charge,
            residual: e.residual,
        })
    }))?;
    let tracks = write_rows(r.ep_tracks.iter().enumerate().flat_map(|(i, tr)| {
        tr.points.iter().map(move |p| TrackRow {
            track: i,
            charge: tr.charge,
            t: p.t,
            kx: p.location.kx,
            ky: p.location.ky,
        })
    }))?;
    let events = write_rows(r.events.iter().map(|e| EventRow {
        kind: e.kind,
        t_lo: e.t_interval.0,
        t_hi: e.t_interval.1,
        tracks: e.tracks.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";"),
        axis: e.axis.map_or(String::new(), |a| a.name().to_string()),
    }))?;
    let intervals = write_rows(r.epfree_intervals.iter().flat_map(|iv| {
        iv.report.m_matrix.iter().map(move |m| IntervalRow {
            t_start: iv.t_start,
            t_end: iv.t_end,
            band_p: m.p,
            band_q: m.q,
            m_x: m.m_x,
            m_y: m.m_y,
        })
    }))?;
    Ok(SweepTables {
        eps,
        tracks,
        events,
        intervals,
    })
}

pub fn parse_sweep_eps_csv(text: &str) -> Result<Vec<SweepEpRow>> {
    read_rows(text)
}

pub fn parse_tracks_csv(text: &str) -> Result<Vec<TrackRow>> {
    read_rows(text)
}

pub fn parse_events_csv(text: &str) -> Result<Vec<EventRow>> {
    read_rows(text)
}

pub fn parse_intervals_csv(text: &str) -> Result<Vec<IntervalRow>> {
    read_rows(text)
}

#[derive(Serialize)]
struct EnvelopeOut<'a, T> {
    schema: &'a str,
    version: u32,
    data: &'a T,
}

#[derive(Deserialize)]
struct EnvelopeIn<T> {
    schema: String,
    version: u32,
    data: T,
}

/// Pretty JSON wrapped in `{schema, version, data}`.
pub fn to_json<T: Serialize>(schema: &str, data: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&EnvelopeOut {
        schema,
        version: SCHEMA_VERSION,
        data,
    })
    .map_err(|e| Error::config(format!("cannot serialize {schema}: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(schema: &str, text: &str) -> Result<T> {
    let env: EnvelopeIn<T> = serde_json::from_str(text).map_err(|e| Error::Config {
        message: format!("malformed {schema} document: {e}"),
        location: Some(format!("line {}", e.line())),
    })?;
    if env.schema != schema {
        return Err(Error::config(format!("expected a {schema} document, found {}", env.schema)));
    }
    if env.version != SCHEMA_VERSION {
        return Err(Error::config(format!("unsupported {schema} schema version {}", env.version)));
    }
    Ok(env.data)
}

/// Plain-text mesh: a header comment, `v kx ky re im flag` lines, then
/// `f a b c d` quads with 1-based vertex indices.
pub fn mesh_text(mesh: &SheetMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sheet {} nx {} ny {}", mesh.sheet, mesh.nx, mesh.ny);
    for v in &mesh.vertices {
        let _ = writeln!(
            out,
            "v {} {} {} {} {}",
            fmt_f64(v.kx),
            fmt_f64(v.ky),
            fmt_f64(v.value.re),
            fmt_f64(v.value.im),
            u8::from(v.flagged)
        );
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
    }
    out
}

pub fn parse_mesh(text: &str) -> Result<SheetMesh> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::config("empty mesh"))?;
    let h: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let bad_header = || Error::config_at("line 1", "malformed mesh header");
    if h.len() != 6 || h[0] != "sheet" || h[2] != "nx" || h[4] != "ny" {
        return Err(bad_header());
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad_header());
    let (sheet, nx, ny) = (num(h[1])?, num(h[3])?, num(h[5])?);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (ln, line) in lines {
        let loc = format!("line {}", ln + 1);
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.first() {
            Some(&"v") if parts.len() == 6 => {
                let f = |i: usize| parts[i].parse::<f64>().map_err(|_| Error::config_at(loc.clone(), "bad number"));
                vertices.push(MeshVertex {
                    kx: f(1)?,
                    ky: f(2)?,
                    value: num_complex::Complex64::new(f(3)?, f(4)?),
                    flagged: parts[5] == "1",
                });
            }
            Some(&"f") if parts.len() == 5 => {
                let mut q = [0usize; 4];
                for (k, p) in parts[1..].iter().enumerate() {
                    let i: usize = p.parse().map_err(|_| Error::config_at(loc.clone(), "bad index"))?;
                    if i == 0 || i > vertices.len() {
                        return Err(Error::config_at(loc.clone(), "face index out of range"));
                    }
                    q[k] = i - 1;
                }
                faces.push(q);
            }
            _ => return Err(Error::config_at(loc, "unrecognised mesh line")),
        }
    }
    if vertices.len() != (nx + 1) * (ny + 1) {
        return Err(Error::config("mesh vertex count does not match its header"));
    }
    Ok(SheetMesh {
        sheet,
        nx,
        ny,
        vertices,
        faces,
    })
}

/// Cut polylines: a `# contour …` header per contour followed by `p kx ky`
/// vertex lines.
pub fn cuts_text(contours: &[DegeneracyContour]) -> String {
    let mut out = String::new();
    for (i, c) in contours.iter().enumerate() {
        let _ = writeln!(
            out,
            "# contour {i} kind {} closed {} winding {} {} bands {} {}",
            c.kind.name(),
            c.closed,
            c.homotopy_class.0,
            c.homotopy_class.1,
            c.bands.0,
            c.bands.1
        );
        for p in &c.polyline {
            let _ = writeln!(out, "p {} {}", fmt_f64(p.kx), fmt_f64(p.ky));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MomentumPoint;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.0, 1.0, -2.5e-300, std::f64::consts::PI, 1.0 / 3.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn eps_table_round_trips() {
        let ep = ExceptionalPoint {
            location: MomentumPoint::new(0.5, 3.0),
            order: 2,
            charge: Some(-0.5),
            residual: 1e-13,
            bands: (0, 1),
        };
        let text = eps_csv(&[ep.clone(), ExceptionalPoint { charge: None, ..ep }]).unwrap();
        assert!(text.starts_with("kx,ky,order,charge,residual,band_p,band_q\n"));
        let rows = parse_eps_csv(&text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].kx, 0.5);
        assert_eq!(rows[0].charge, Some(-0.5));
        assert_eq!(rows[1].charge, None);
    }

    #[test]
    fn json_envelope_checks_schema() {
        let text = to_json("numbers", &vec![1.0, 2.5]).unwrap();
        let back: Vec<f64> = from_json("numbers", &text).unwrap();
        assert_eq!(back, vec![1.0, 2.5]);
        assert!(from_json::<Vec<f64>>("other", &text).is_err());
    }
}
