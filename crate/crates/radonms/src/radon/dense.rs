//! Dense matrix oracle for the forward projector and its adjoint.
//!
//! The matrix is assembled from exactly the same quadrature and
//! interpolation weights as the matrix-free projector, so applying it to a
//! flattened image reproduces `forward_project` to rounding error. Its
//! rescaled transpose is the exact adjoint of the forward map with respect
//! to the discrete measures of [`crate::metrics`], and doubles as an
//! independent discretization of the back projection.

use nalgebra::{DMatrix, DVector};

use super::forward::{check_dim_and_coverage, row_weights};
use super::geometry::ProjectionGeometry;
use super::sinogram::Sinogram;
use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND};

/// Default memory cap for dense assembly (bytes).
pub const DEFAULT_DENSE_CAP: usize = 512 << 20;

/// Explicit matrix of the forward projection, rows indexed by sinogram
/// samples (direction-major), columns by flattened image cells.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    geometry: ProjectionGeometry,
    grid: ImageGrid,
}

/// Assemble the dense forward matrix; errors if the estimated footprint
/// exceeds `cap_bytes`.
pub fn build_dense_operator(
    geom: &ProjectionGeometry,
    grid: &ImageGrid,
    cap_bytes: usize,
) -> Result<DenseOperator> {
    check_dim_and_coverage(grid, geom)?;
    let rows = geom.n_samples();
    let cols = grid.len();
    let required = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(std::mem::size_of::<f64>()))
        .ok_or(Error::MemoryCap {
            required: usize::MAX,
            cap: cap_bytes,
        })?;
    if required > cap_bytes {
        return Err(Error::MemoryCap {
            required,
            cap: cap_bytes,
        });
    }
    let mut matrix = DMatrix::zeros(rows, cols);
    for d in 0..geom.n_directions() {
        for o in 0..geom.n_offsets() {
            let r = geom.sample_index(d, o);
            row_weights(grid, geom, d, o, |cell, w| {
                matrix[(r, cell)] += w;
            });
        }
    }
    Ok(DenseOperator {
        matrix,
        geometry: geom.clone(),
        grid: grid.clone(),
    })
}

impl DenseOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn geometry(&self) -> &ProjectionGeometry {
        &self.geometry
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Matrix times flattened image.
    pub fn apply(&self, f: &ImageND) -> Result<Sinogram> {
        self.grid.expect_same(f.grid())?;
        let v = DVector::from_column_slice(f.values());
        let out = &self.matrix * v;
        Sinogram::from_values(self.geometry.clone(), out.data.into())
    }

    /// Transpose of the forward matrix, row-rescaled by the quadrature and
    /// probability constants so that it realizes the direction-averaged
    /// back projection dual to `apply`:
    ///
    /// `<Af, g>_sino = c_geom * <f, A^T_resc g>_image`
    ///
    /// holds to rounding error, with `c_geom = full_sphere_measure()`.
    /// The rescaling is `diag(dX * w_d) / (sum_d w_d * cell_volume)`.
    pub fn adjoint_back_project(&self, g: &Sinogram) -> Result<ImageND> {
        self.geometry.expect_same(g.geometry())?;
        let geom = &self.geometry;
        let dx = geom.offset_spacing();
        let n_off = geom.n_offsets();
        let mut scaled = DVector::zeros(geom.n_samples());
        for d in 0..geom.n_directions() {
            let wd = geom.dir_weight(d) * dx;
            for o in 0..n_off {
                let i = geom.sample_index(d, o);
                scaled[i] = wd * g.values()[i];
            }
        }
        let denom = geom.half_sphere_measure() * self.grid.cell_volume();
        let out = self.matrix.tr_mul(&scaled) / denom;
        ImageND::from_values(self.grid.clone(), out.data.into())
    }

    /// Singular values, nonincreasing.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .matrix
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    /// Full SVD (u, sigma, v_t) with sigma nonincreasing.
    pub fn svd(&self) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
        let svd = self.matrix.clone().svd(true, true);
        (svd.u.unwrap(), svd.singular_values, svd.v_t.unwrap())
    }
}
