//! Sinogram CSV format: a one-line header
//! `n_offsets=..;offset_spacing=..;xmax=..;directions=<spec>`
//! followed by the sample values direction-major, one line per direction.
//!
//! The directions spec is one of
//! * `angles:N` - N uniform 2D angles in [0, pi);
//! * `fibonacci:N` - the default 3D hemisphere lattice;
//! * `inline:x y z w;x y z w;...` - explicit unit vectors with weights;
//! * `file:REL_PATH` - a CSV (x,y,z,w per line) next to the sinogram.

use std::fmt::Write as _;
use std::path::Path;

use super::image_csv::parse_floats;
use crate::error::{Error, Result};
use crate::radon::{DirectionSet, ProjectionGeometry, Sinogram};

pub fn sinogram_to_string(g: &Sinogram) -> String {
    let geom = g.geometry();
    let mut out = String::new();
    let dirs = match geom.directions() {
        DirectionSet::UniformAngles2 { count } => format!("angles:{count}"),
        DirectionSet::Hemisphere3 { dirs, weights } => {
            let body = dirs
                .iter()
                .zip(weights)
                .map(|(d, w)| format!("{} {} {} {}", d[0], d[1], d[2], w))
                .collect::<Vec<_>>()
                .join(";");
            format!("inline:{body}")
        }
    };
    let _ = writeln!(
        out,
        "n_offsets={};offset_spacing={};xmax={};directions={dirs}",
        geom.n_offsets(),
        geom.offset_spacing(),
        geom.x_max()
    );
    for d in 0..geom.n_directions() {
        let row: Vec<String> = (0..geom.n_offsets())
            .map(|o| g.value(d, o).to_string())
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn write_sinogram(path: &Path, g: &Sinogram) -> Result<()> {
    super::atomic_write(path, sinogram_to_string(g).as_bytes())
}

/// Parse a sinogram; `base_dir` resolves `directions=file:` references.
pub fn sinogram_from_str(text: &str, base_dir: Option<&Path>) -> Result<Sinogram> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sinogram file".into()))?;
    let mut n_offsets = None;
    let mut offset_spacing = None;
    let mut x_max = None;
    let mut directions: Option<String> = None;
    for field in header.split(';') {
        // The inline directions spec itself contains ';' separators, so
        // everything after `directions=` belongs to it.
        if let Some(rest) = field.strip_prefix("directions=") {
            let start = header.find("directions=").expect("present");
            directions = Some(header[start + "directions=".len()..].to_string());
            let _ = rest;
            break;
        }
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field '{field}'")))?;
        match key.trim() {
            "n_offsets" => {
                n_offsets = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("n_offsets: {e}")))?,
                )
            }
            "offset_spacing" => offset_spacing = Some(parse_one(value)?),
            "xmax" => x_max = Some(parse_one(value)?),
            other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
        }
    }
    let n_offsets = n_offsets.ok_or_else(|| Error::Parse("header missing n_offsets".into()))?;
    let x_max = x_max.ok_or_else(|| Error::Parse("header missing xmax".into()))?;
    let directions = directions.ok_or_else(|| Error::Parse("header missing directions".into()))?;

    let geom = parse_directions(&directions, n_offsets, x_max, base_dir)?;
    if let Some(dx) = offset_spacing {
        let want = geom.offset_spacing();
        if (dx - want).abs() > 1e-12 * want.max(1.0) {
            return Err(Error::Parse(format!(
                "offset_spacing {dx} inconsistent with n_offsets/xmax (expected {want})"
            )));
        }
    }

    let mut values = Vec::with_capacity(geom.n_samples());
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        values.extend(parse_floats(line)?);
    }
    Sinogram::from_values(geom, values)
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    let text = std::fs::read_to_string(path)?;
    sinogram_from_str(&text, path.parent())
}

fn parse_one(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("'{text}': {e}")))
}

fn parse_directions(
    spec: &str,
    n_offsets: usize,
    x_max: f64,
    base_dir: Option<&Path>,
) -> Result<ProjectionGeometry> {
    if let Some(n) = spec.strip_prefix("angles:") {
        let count = n
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("angles: {e}")))?;
        return ProjectionGeometry::new_2d(n_offsets, x_max, count);
    }
    if let Some(n) = spec.strip_prefix("fibonacci:") {
        let count = n
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("fibonacci: {e}")))?;
        return ProjectionGeometry::fibonacci_3d(n_offsets, x_max, count);
    }
    if let Some(body) = spec.strip_prefix("inline:") {
        return parse_inline_dirs(body.split(';'), n_offsets, x_max);
    }
    if let Some(rel) = spec.strip_prefix("file:") {
        let path = match base_dir {
            Some(dir) => dir.join(rel.trim()),
            None => rel.trim().into(),
        };
        let text = std::fs::read_to_string(&path)?;
        return parse_inline_dirs(
            text.lines().filter(|l| !l.trim().is_empty()),
            n_offsets,
            x_max,
        );
    }
    Err(Error::Parse(format!("unknown directions spec '{spec}'")))
}

fn parse_inline_dirs<'a>(
    entries: impl Iterator<Item = &'a str>,
    n_offsets: usize,
    x_max: f64,
) -> Result<ProjectionGeometry> {
    let mut dirs = Vec::new();
    let mut weights = Vec::new();
    for entry in entries {
        let parts: Vec<f64> = entry
            .split([' ', ','])
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("direction '{t}': {e}")))
            })
            .collect::<Result<_>>()?;
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "direction entry '{entry}' needs 4 numbers (x y z w)"
            )));
        }
        dirs.push([parts[0], parts[1], parts[2]]);
        weights.push(parts[3]);
    }
    ProjectionGeometry::new_3d(n_offsets, x_max, dirs, weights)
}
