//! Image CSV format: a one-line header
//! `dims=d1,d2[,d3];spacing=s1,...;origin=o1,...`
//! followed by the cell values row-major (last axis fastest), one line per
//! trailing-axis run. Values are written with Rust's shortest
//! round-tripping decimal formatting, so write-then-read reproduces the
//! in-memory doubles bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND};

pub fn image_to_string(img: &ImageND) -> String {
    let grid = img.grid();
    let mut out = String::new();
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let dims = grid
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let _ = writeln!(
        out,
        "dims={dims};spacing={};origin={}",
        join(grid.spacing()),
        join(grid.origin())
    );
    let row = *grid.dims().last().expect("nonempty dims");
    for chunk in img.values().chunks(row) {
        let _ = writeln!(out, "{}", join(chunk));
    }
    out
}

pub fn write_image(path: &Path, img: &ImageND) -> Result<()> {
    super::atomic_write(path, image_to_string(img).as_bytes())
}

pub fn image_from_str(text: &str) -> Result<ImageND> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty image file".into()))?;
    let mut dims: Option<Vec<usize>> = None;
    let mut spacing: Option<Vec<f64>> = None;
    let mut origin: Option<Vec<f64>> = None;
    for field in header.split(';') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field '{field}'")))?;
        match key.trim() {
            "dims" => {
                dims = Some(
                    value
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Parse(format!("dims: {e}")))?,
                )
            }
            "spacing" => spacing = Some(parse_floats(value)?),
            "origin" => origin = Some(parse_floats(value)?),
            other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
        }
    }
    let dims = dims.ok_or_else(|| Error::Parse("header missing dims".into()))?;
    let spacing = spacing.ok_or_else(|| Error::Parse("header missing spacing".into()))?;
    let origin = origin.ok_or_else(|| Error::Parse("header missing origin".into()))?;
    let grid = ImageGrid::new(&dims, &spacing, &origin)?;
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        values.extend(parse_floats(line)?);
    }
    ImageND::from_values(grid, values)
}

pub fn read_image(path: &Path) -> Result<ImageND> {
    let text = std::fs::read_to_string(path)?;
    image_from_str(&text)
}

pub(crate) fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("'{t}': {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = ImageGrid::new(&[3, 4], &[0.1, 0.25], &[-0.15, 2.0]).unwrap();
        let img = ImageND::from_fn(grid, |p| (p[0] * 37.1).sin() / 3.0 + p[1]);
        let text = image_to_string(&img);
        let back = image_from_str(&text).unwrap();
        assert_eq!(back.grid(), img.grid());
        assert_eq!(back.values(), img.values());
    }

    #[test]
    fn header_example_parses() {
        let text = "dims=2,2;spacing=1,1;origin=-0.5,-0.5\n1,2\n3,4\n";
        let img = image_from_str(text).unwrap();
        assert_eq!(img.values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn bad_headers_are_rejected() {
        assert!(image_from_str("").is_err());
        assert!(image_from_str("dims=2,2;spacing=1,1\n1,2\n3,4\n").is_err());
        assert!(image_from_str("dims=2,2;spacing=1,1;origin=0,0\n1,2\n").is_err());
    }
}
