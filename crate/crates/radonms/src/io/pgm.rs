//! 8-bit ASCII PGM export for visual inspection. Lossy by design: values
//! are affinely rescaled to 0..255 between the data minimum and maximum
//! (recorded in a header comment). 3D images export their central slice
//! along the first axis. Never used as a source format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::grid::ImageND;
use crate::ms::Partition;

pub fn image_to_pgm(img: &ImageND) -> String {
    let grid = img.grid();
    let (rows, cols, slice): (usize, usize, &[f64]) = match grid.ndim() {
        2 => (grid.dims()[0], grid.dims()[1], img.values()),
        _ => {
            let plane = grid.dims()[1] * grid.dims()[2];
            let mid = grid.dims()[0] / 2;
            (
                grid.dims()[1],
                grid.dims()[2],
                &img.values()[mid * plane..(mid + 1) * plane],
            )
        }
    };
    let lo = slice.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    let _ = writeln!(out, "P2");
    let _ = writeln!(
        out,
        "# affine 8-bit scaling: 0 = {lo}, 255 = {hi}{}",
        if grid.ndim() == 3 { " (central slice, axis 0)" } else { "" }
    );
    let _ = writeln!(out, "{cols} {rows}");
    let _ = writeln!(out, "255");
    for r in 0..rows {
        let row: Vec<String> = (0..cols)
            .map(|c| {
                let v = slice[r * cols + c];
                format!("{}", ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8)
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn write_image_pgm(path: &Path, img: &ImageND) -> Result<()> {
    super::atomic_write(path, image_to_pgm(img).as_bytes())
}

/// Integer PGM of a label field (2D partitions); pixel value = label.
pub fn partition_to_pgm(p: &Partition, dims: &[usize]) -> String {
    let (rows, cols) = (dims[0], dims[1]);
    let maxval = (p.m() - 1).max(1);
    let mut out = String::new();
    let _ = writeln!(out, "P2");
    let _ = writeln!(out, "# region labels, one integer per cell");
    let _ = writeln!(out, "{cols} {rows}");
    let _ = writeln!(out, "{maxval}");
    for r in 0..rows {
        let row: Vec<String> = (0..cols)
            .map(|c| p.labels()[r * cols + c].to_string())
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn write_partition_pgm(path: &Path, p: &Partition, dims: &[usize]) -> Result<()> {
    super::atomic_write(path, partition_to_pgm(p, dims).as_bytes())
}
