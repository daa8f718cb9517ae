//! Dual map: direction-averaged back projection of sinogram data.

use rayon::prelude::*;

use super::sinogram::Sinogram;
use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND};

/// Back projection result together with a truncation report: evaluation
/// points whose offset fell outside [-x_max, x_max] contribute zero and
/// are counted rather than rejected, so diagnostics can still run on
/// partial data.
#[derive(Debug, Clone)]
pub struct BackProjection {
    pub image: ImageND,
    /// (cell, direction) evaluations outside the offset range.
    pub truncated_evals: usize,
    /// Total (cell, direction) evaluations.
    pub total_evals: usize,
}

impl BackProjection {
    pub fn is_truncated(&self) -> bool {
        self.truncated_evals > 0
    }
}

/// Average of g(xi . x, xi) over the stored directions with their
/// quadrature weights (the rotation-invariant probability measure on
/// hyperplanes through x), linear interpolation in the offset.
pub fn back_project(g: &Sinogram, grid: &ImageGrid) -> Result<BackProjection> {
    let geom = g.geometry();
    if grid.ndim() != geom.ndim() {
        return Err(Error::GeometryMismatch(format!(
            "{}D grid vs {}D geometry",
            grid.ndim(),
            geom.ndim()
        )));
    }
    let n_dir = geom.n_directions();
    let n_off = geom.n_offsets();
    let inv_dx = 1.0 / geom.offset_spacing();
    let x_max = geom.x_max();
    let weight_total = geom.half_sphere_measure();

    // Direction vectors and weights, gathered once.
    let dirs: Vec<[f64; 3]> = (0..n_dir)
        .map(|d| match geom.ndim() {
            2 => {
                let v = geom.dir2(d);
                [v[0], v[1], 0.0]
            }
            _ => geom.dir3(d),
        })
        .collect();
    let weights: Vec<f64> = (0..n_dir).map(|d| geom.dir_weight(d)).collect();

    let ndim = grid.ndim();
    let results: Vec<(f64, usize)> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut p = [0.0f64; 3];
            grid.center_of_flat(flat, &mut p);
            let mut acc = 0.0;
            let mut truncated = 0usize;
            for d in 0..n_dir {
                let xi = dirs[d];
                let mut x = p[0] * xi[0] + p[1] * xi[1];
                if ndim == 3 {
                    x += p[2] * xi[2];
                }
                let u = (x + x_max) * inv_dx;
                if !(0.0..=(n_off as f64 - 1.0)).contains(&u) {
                    truncated += 1;
                    continue;
                }
                let i0 = (u.floor() as usize).min(n_off - 2);
                let frac = u - i0 as f64;
                let row = d * n_off;
                let val = (1.0 - frac) * g.values()[row + i0] + frac * g.values()[row + i0 + 1];
                acc += weights[d] * val;
            }
            (acc / weight_total, truncated)
        })
        .collect();

    let mut values = Vec::with_capacity(grid.len());
    let mut truncated_evals = 0usize;
    for (v, t) in results {
        values.push(v);
        truncated_evals += t;
    }
    Ok(BackProjection {
        image: ImageND::from_values(grid.clone(), values)?,
        truncated_evals,
        total_evals: grid.len() * n_dir,
    })
}
