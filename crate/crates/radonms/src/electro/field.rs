//! 3D scalar and vector fields with finite-difference calculus.

use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND};

/// Scalar potential on a 3D grid.
pub type ScalarField3 = ImageND;

/// Vector field on a 3D grid, one value triple per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: ImageGrid,
    components: [Vec<f64>; 3],
}

impl VectorField3 {
    pub fn new(grid: ImageGrid, components: [Vec<f64>; 3]) -> Result<Self> {
        if grid.ndim() != 3 {
            return Err(Error::InvalidGrid("vector fields are 3D".into()));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::InvalidGrid("component length mismatch".into()));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("vector field values".into()));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: ImageGrid) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, [vec![0.0; n], vec![0.0; n], vec![0.0; n]])
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    pub fn scale(&self, a: f64) -> VectorField3 {
        let comps = [
            self.components[0].iter().map(|&v| a * v).collect(),
            self.components[1].iter().map(|&v| a * v).collect(),
            self.components[2].iter().map(|&v| a * v).collect(),
        ];
        VectorField3 {
            grid: self.grid.clone(),
            components: comps,
        }
    }

    /// Volume-weighted squared L2 norm over all three components.
    pub fn norm_sq(&self) -> f64 {
        crate::metrics::components_norm_sq(
            self.grid.cell_volume(),
            &[
                &self.components[0],
                &self.components[1],
                &self.components[2],
            ],
        )
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

fn check_3d(grid: &ImageGrid) -> Result<()> {
    if grid.ndim() != 3 {
        return Err(Error::InvalidGrid("expected a 3D grid".into()));
    }
    Ok(())
}

/// Derivative along one axis: centered in the interior, one-sided on the
/// boundary faces.
fn diff_axis(values: &[f64], grid: &ImageGrid, axis: usize) -> Vec<f64> {
    let dims = [grid.dims()[0], grid.dims()[1], grid.dims()[2]];
    let h = grid.spacing()[axis];
    let stride: usize = grid.dims()[axis + 1..].iter().product();
    let mut out = vec![0.0; values.len()];
    let mut idx = [0usize; 3];
    for (flat, slot) in out.iter_mut().enumerate() {
        grid.unflat(flat, &mut idx);
        let i = idx[axis];
        *slot = if i == 0 {
            (values[flat + stride] - values[flat]) / h
        } else if i == dims[axis] - 1 {
            (values[flat] - values[flat - stride]) / h
        } else {
            (values[flat + stride] - values[flat - stride]) / (2.0 * h)
        };
    }
    out
}

/// Gradient by centered differences (one-sided at the boundary).
pub fn gradient(phi: &ScalarField3) -> Result<VectorField3> {
    check_3d(phi.grid())?;
    let g = phi.grid();
    VectorField3::new(
        g.clone(),
        [
            diff_axis(phi.values(), g, 0),
            diff_axis(phi.values(), g, 1),
            diff_axis(phi.values(), g, 2),
        ],
    )
}

/// Divergence by centered differences of the components.
pub fn divergence(e: &VectorField3) -> Result<ImageND> {
    let g = e.grid();
    let mut out = vec![0.0; g.len()];
    for axis in 0..3 {
        for (o, d) in out.iter_mut().zip(diff_axis(e.component(axis), g, axis)) {
            *o += d;
        }
    }
    ImageND::from_values(g.clone(), out)
}

/// Curl by centered differences.
pub fn curl(e: &VectorField3) -> Result<VectorField3> {
    let g = e.grid();
    let d = |comp: usize, axis: usize| diff_axis(e.component(comp), g, axis);
    let (d2y, d1z) = (d(2, 1), d(1, 2));
    let (d0z, d2x) = (d(0, 2), d(2, 0));
    let (d1x, d0y) = (d(1, 0), d(0, 1));
    let n = g.len();
    let mut c0 = vec![0.0; n];
    let mut c1 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    for i in 0..n {
        c0[i] = d2y[i] - d1z[i];
        c1[i] = d0z[i] - d2x[i];
        c2[i] = d1x[i] - d0y[i];
    }
    VectorField3::new(g.clone(), [c0, c1, c2])
}

/// Compact 7-point Laplacian (second differences per axis); one-sided
/// copies of the nearest interior stencil on boundary faces are not
/// attempted: boundary cells carry the interior formula shifted, so
/// comparisons should mask to the interior.
pub fn laplacian_7pt(phi: &ScalarField3) -> Result<ImageND> {
    check_3d(phi.grid())?;
    let g = phi.grid().clone();
    let dims = [g.dims()[0], g.dims()[1], g.dims()[2]];
    let mut out = vec![0.0; g.len()];
    let mut idx = [0usize; 3];
    for flat in 0..g.len() {
        g.unflat(flat, &mut idx);
        let mut acc = 0.0;
        for axis in 0..3 {
            let h = g.spacing()[axis];
            let stride: usize = g.dims()[axis + 1..].iter().product();
            let i = idx[axis];
            let (a, b, c) = if i == 0 {
                (flat, flat + stride, flat + 2 * stride)
            } else if i == dims[axis] - 1 {
                (flat - 2 * stride, flat - stride, flat)
            } else {
                (flat - stride, flat, flat + stride)
            };
            acc += (phi.values()[a] - 2.0 * phi.values()[b] + phi.values()[c]) / (h * h);
        }
        out[flat] = acc;
    }
    ImageND::from_values(g, out)
}

/// Relative L2 distance of two cell arrays over the interior (cells at
/// least `margin` cells from every face), normalized by the reference.
pub fn interior_relative_error(
    a: &[f64],
    reference: &[f64],
    grid: &ImageGrid,
    margin: usize,
) -> f64 {
    let mut idx = [0usize; 3];
    let mut num = 0.0;
    let mut den = 0.0;
    for flat in 0..grid.len() {
        grid.unflat(flat, &mut idx);
        let inside = (0..3).all(|ax| idx[ax] >= margin && idx[ax] + margin < grid.dims()[ax]);
        if inside {
            let d = a[flat] - reference[flat];
            num += d * d;
            den += reference[flat] * reference[flat];
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
