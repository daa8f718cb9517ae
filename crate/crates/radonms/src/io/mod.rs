//! File formats: image and sinogram CSV, PGM export, JSON schemas, and
//! atomic writes (temp file plus rename, so readers never observe a
//! partial artifact).

pub mod image_csv;
pub mod json;
pub mod pgm;
pub mod sinogram_csv;

use std::path::Path;

use crate::error::Result;

pub use image_csv::{image_from_str, image_to_string, read_image, write_image};
pub use json::{read_phantom_spec, write_json, GeometrySpec, WeightedDirection};
pub use pgm::{image_to_pgm, partition_to_pgm, write_image_pgm, write_partition_pgm};
pub use sinogram_csv::{read_sinogram, sinogram_from_str, sinogram_to_string, write_sinogram};

/// Write a file atomically: the payload lands in a temporary sibling and
/// is renamed over the target.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp_path, bytes)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

/// Partition CSV: header `dims=..;m=..;delta=..` then labels row-major.
pub fn partition_to_string(p: &crate::ms::Partition, grid: &crate::grid::ImageGrid) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let dims = grid
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let _ = writeln!(out, "dims={dims};m={};delta={}", p.m(), p.delta());
    let row = *grid.dims().last().expect("nonempty");
    for chunk in p.labels().chunks(row) {
        let line = chunk
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn write_partition(
    path: &Path,
    p: &crate::ms::Partition,
    grid: &crate::grid::ImageGrid,
) -> Result<()> {
    atomic_write(path, partition_to_string(p, grid).as_bytes())
}

/// Write a 3D vector field as one image CSV per component:
/// `<stem>.x.csv`, `<stem>.y.csv`, `<stem>.z.csv` next to `path`.
pub fn write_vector_field(path: &Path, field: &crate::electro::VectorField3) -> Result<Vec<std::path::PathBuf>> {
    let mut written = Vec::with_capacity(3);
    for (axis, suffix) in ["x", "y", "z"].iter().enumerate() {
        let img = crate::grid::ImageND::from_values(
            field.grid().clone(),
            field.component(axis).to_vec(),
        )?;
        let target = path.with_extension(format!("{suffix}.csv"));
        write_image(&target, &img)?;
        written.push(target);
    }
    Ok(written)
}
