//! Per-cell projection columns for incremental fidelity updates.
//!
//! A single-cell label move changes the induced image by a multiple of
//! one cell indicator, so its effect on the data residual is the cached
//! projection column of that cell. Columns are assembled once from the
//! same quadrature weights as the forward projector.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{ImageGrid, ImageND};
use crate::radon::forward::row_weights;
use crate::radon::{ProjectionGeometry, Sinogram};

/// Sparse projection columns, one per grid cell, plus the sample measure
/// of the sinogram lattice.
pub struct ProjectionCache {
    grid: ImageGrid,
    geometry: ProjectionGeometry,
    /// Per cell: (sample index, weight), consolidated and sorted.
    columns: Vec<Vec<(u32, f64)>>,
    /// Measure of each sinogram sample (2 dX w_d, double covering).
    sample_measure: Vec<f64>,
    /// Measure-weighted squared norm of each column.
    column_norm_sq: Vec<f64>,
}

impl ProjectionCache {
    pub fn build(grid: &ImageGrid, geom: &ProjectionGeometry) -> Result<Self> {
        crate::radon::forward::check_dim_and_coverage(grid, geom)?;
        let n_cells = grid.len();
        let n_off = geom.n_offsets();

        // Scatter row weights into per-cell columns, one direction at a
        // time in parallel, then merge.
        let per_dir: Vec<Vec<Vec<(u32, f64)>>> = (0..geom.n_directions())
            .into_par_iter()
            .map(|d| {
                let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_cells];
                for o in 0..n_off {
                    let sample = geom.sample_index(d, o) as u32;
                    row_weights(grid, geom, d, o, |cell, w| {
                        cols[cell].push((sample, w));
                    });
                }
                for col in &mut cols {
                    consolidate(col);
                }
                cols
            })
            .collect();

        let mut columns: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_cells];
        for cols in per_dir {
            for (cell, mut part) in cols.into_iter().enumerate() {
                columns[cell].append(&mut part);
            }
        }
        for col in &mut columns {
            col.shrink_to_fit();
        }

        let mut sample_measure = vec![0.0; geom.n_samples()];
        let dx = geom.offset_spacing();
        for d in 0..geom.n_directions() {
            let w = 2.0 * dx * geom.dir_weight(d);
            for o in 0..n_off {
                sample_measure[geom.sample_index(d, o)] = w;
            }
        }
        let column_norm_sq = columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|&(s, w)| sample_measure[s as usize] * w * w)
                    .sum()
            })
            .collect();

        Ok(Self {
            grid: grid.clone(),
            geometry: geom.clone(),
            columns,
            sample_measure,
            column_norm_sq,
        })
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn geometry(&self) -> &ProjectionGeometry {
        &self.geometry
    }

    pub fn sample_measure(&self) -> &[f64] {
        &self.sample_measure
    }

    pub fn column_norm_sq(&self, cell: usize) -> f64 {
        self.column_norm_sq[cell]
    }

    /// Measure-weighted inner product of a cell column with a sample
    /// vector.
    pub fn column_dot(&self, cell: usize, samples: &[f64]) -> f64 {
        self.columns[cell]
            .iter()
            .map(|&(s, w)| self.sample_measure[s as usize] * w * samples[s as usize])
            .sum()
    }

    /// Add `scale` times the cell column into a sample vector.
    pub fn add_column(&self, cell: usize, scale: f64, target: &mut [f64]) {
        for &(s, w) in &self.columns[cell] {
            target[s as usize] += scale * w;
        }
    }

    /// Accumulated projection of the indicator of a cell set (given by a
    /// membership predicate) as a dense sample vector.
    pub fn project_indicator(&self, mut member: impl FnMut(usize) -> bool) -> Vec<f64> {
        let mut out = vec![0.0; self.geometry.n_samples()];
        for cell in 0..self.columns.len() {
            if member(cell) {
                self.add_column(cell, 1.0, &mut out);
            }
        }
        out
    }

    /// Forward projection of an arbitrary image through the cached
    /// columns; identical weights to the matrix-free projector.
    pub fn project_image(&self, f: &ImageND) -> Result<Sinogram> {
        self.grid.expect_same(f.grid())?;
        let mut out = vec![0.0; self.geometry.n_samples()];
        for (cell, &v) in f.values().iter().enumerate() {
            if v != 0.0 {
                self.add_column(cell, v, &mut out);
            }
        }
        Sinogram::from_values(self.geometry.clone(), out)
    }

    /// Measure-weighted inner product of two dense sample vectors.
    pub fn weighted_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.sample_measure)
            .map(|((&x, &y), &w)| w * x * y)
            .sum()
    }
}

fn consolidate(col: &mut Vec<(u32, f64)>) {
    if col.is_empty() {
        return;
    }
    col.sort_by_key(|&(s, _)| s);
    let mut out = Vec::with_capacity(col.len() / 2);
    let mut cur = col[0];
    for &(s, w) in &col[1..] {
        if s == cur.0 {
            cur.1 += w;
        } else {
            out.push(cur);
            cur = (s, w);
        }
    }
    out.push(cur);
    *col = out;
}
