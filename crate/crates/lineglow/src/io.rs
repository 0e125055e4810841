//! Dataset ingestion.
//!
//! CSV: `line_id,x,y[,cluster]`, one vertex per row, rows of a line
//! contiguous and in vertex order, optional header. JSON: an array of
//! `{"id": .., "cluster": .., "points": [[x, y], ..]}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use lineglow_core::polyline::fit_to_grid;
use lineglow_core::{GridSize, GridTransform, Polyline, Vec2};
use serde::Deserialize;

use crate::error::{Error, Result};

pub const MIN_GRID_SIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// Lines in data units plus non-fatal notes (dropped lines).
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub lines: Vec<Polyline>,
    pub warnings: Vec<String>,
}

/// Lines mapped to grid coordinates.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub lines: Vec<Polyline>,
    pub transform: GridTransform,
    pub warnings: Vec<String>,
}

pub fn read_dataset(path: &Path, format: Option<Format>) -> Result<Dataset> {
    let format = format.or_else(|| Format::from_path(path)).ok_or_else(|| Error::Format {
        path: path.into(),
        message: "unknown format, expected .csv or .json".into(),
    })?;
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let ds = match format {
        Format::Csv => parse_csv(path, &text)?,
        Format::Json => parse_json(path, &text)?,
    };
    if ds.lines.is_empty() {
        return Err(Error::Format {
            path: path.into(),
            message: "dataset contains no usable line".into(),
        });
    }
    Ok(ds)
}

/// Reads a dataset and fits it into a `width x height` grid.
pub fn ingest(
    path: &Path,
    format: Option<Format>,
    width: usize,
    height: usize,
    margin: f64,
) -> Result<Ingested> {
    if width < MIN_GRID_SIDE || height < MIN_GRID_SIDE {
        return Err(Error::Usage(format!(
            "grid must be at least {MIN_GRID_SIDE}x{MIN_GRID_SIDE}"
        )));
    }
    let ds = read_dataset(path, format)?;
    let (lines, transform) = fit_to_grid(&ds.lines, GridSize::new(width, height), margin)?;
    Ok(Ingested {
        lines,
        transform,
        warnings: ds.warnings,
    })
}

struct Pending {
    id: u32,
    cluster: Option<u32>,
    first_row: u64,
    vertices: Vec<Vec2>,
}

fn finish(p: Pending, ds: &mut Dataset) {
    match Polyline::new(p.id, p.vertices, p.cluster) {
        Some(l) => ds.lines.push(l),
        None => ds.warnings.push(format!(
            "line {} (row {}): fewer than 2 distinct vertices, dropped",
            p.id, p.first_row
        )),
    }
}

pub fn parse_csv(path: &Path, text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let row_err = |row: u64, message: String| Error::Row {
        path: PathBuf::from(path),
        row,
        message,
    };
    let mut ds = Dataset::default();
    let mut seen = BTreeSet::new();
    let mut current: Option<Pending> = None;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            let row = e.position().map_or(i as u64 + 1, |p| p.line());
            row_err(row, e.to_string())
        })?;
        let row = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue; // header
        }
        if rec.len() != 3 && rec.len() != 4 {
            return Err(row_err(row, format!("expected 3 or 4 fields, found {}", rec.len())));
        }
        let id: u32 = rec[0]
            .parse()
            .map_err(|_| row_err(row, format!("invalid line_id {:?}", &rec[0])))?;
        let x: f64 = rec[1]
            .parse()
            .map_err(|_| row_err(row, format!("invalid x {:?}", &rec[1])))?;
        let y: f64 = rec[2]
            .parse()
            .map_err(|_| row_err(row, format!("invalid y {:?}", &rec[2])))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(row_err(row, "coordinates must be finite".into()));
        }
        let cluster = match rec.get(3) {
            None | Some("") => None,
            Some(c) => Some(
                c.parse::<u32>()
                    .map_err(|_| row_err(row, format!("invalid cluster {c:?}")))?,
            ),
        };
        match current.as_mut() {
            Some(p) if p.id == id => {
                if cluster.is_some() && p.cluster.is_some() && cluster != p.cluster {
                    return Err(row_err(row, format!("line {id} changes cluster")));
                }
                p.cluster = p.cluster.or(cluster);
                p.vertices.push(Vec2::new(x, y));
            }
            _ => {
                if !seen.insert(id) {
                    return Err(row_err(row, format!("rows of line {id} are not contiguous")));
                }
                if let Some(p) = current.take() {
                    finish(p, &mut ds);
                }
                current = Some(Pending {
                    id,
                    cluster,
                    first_row: row,
                    vertices: vec![Vec2::new(x, y)],
                });
            }
        }
    }
    if let Some(p) = current.take() {
        finish(p, &mut ds);
    }
    Ok(ds)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLine {
    id: u32,
    #[serde(default)]
    cluster: Option<u32>,
    points: Vec<[f64; 2]>,
}

pub fn parse_json(path: &Path, text: &str) -> Result<Dataset> {
    let raw: Vec<JsonLine> = serde_json::from_str(text).map_err(|e| Error::Row {
        path: path.into(),
        row: e.line() as u64,
        message: e.to_string(),
    })?;
    let mut ds = Dataset::default();
    let mut seen = BTreeSet::new();
    for (i, l) in raw.into_iter().enumerate() {
        if !seen.insert(l.id) {
            return Err(Error::Format {
                path: path.into(),
                message: format!("duplicate line id {} (entry {})", l.id, i + 1),
            });
        }
        let vertices = l.points.iter().map(|p| Vec2::new(p[0], p[1])).collect();
        finish(
            Pending {
                id: l.id,
                cluster: l.cluster,
                first_row: i as u64 + 1,
                vertices,
            },
            &mut ds,
        );
    }
    Ok(ds)
}

/// Reads `line_id,cluster` rows (optional header).
pub fn read_clusters(path: &Path) -> Result<BTreeMap<u32, u32>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Row {
            path: path.into(),
            row: e.position().map_or(i as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let row = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<u32>().is_err()) {
            continue;
        }
        let parse = |k: usize| -> Result<u32> {
            rec.get(k)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Error::Row {
                    path: path.into(),
                    row,
                    message: "expected line_id,cluster".into(),
                })
        };
        out.insert(parse(0)?, parse(1)?);
    }
    Ok(out)
}

/// Overrides cluster labels from a `line_id -> cluster` map.
pub fn apply_clusters(lines: &mut [Polyline], clusters: &BTreeMap<u32, u32>) {
    for l in lines {
        if let Some(&c) = clusters.get(&l.id) {
            l.cluster = Some(c);
        }
    }
}

/// CSV text for a set of lines, the inverse of [`parse_csv`].
pub fn to_csv(lines: &[Polyline]) -> String {
    let mut out = String::from("line_id,x,y,cluster\n");
    for l in lines {
        for v in &l.vertices {
            let c = l.cluster.map(|c| c.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", l.id, v.x, v.y, c));
        }
    }
    out
}
