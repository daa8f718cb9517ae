//! Regular grids and sampled scalar images in two or three dimensions.
//!
//! A grid is described by its cell counts, per-axis spacings and the
//! physical coordinate of the center of cell (0, …, 0). Values are stored
//! row-major with the last axis fastest, and every cell value is a finite
//! `f64`. Points outside the grid support are treated as zero density by
//! the samplers.

use crate::error::{Error, Result};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

/// A regular N-dimensional grid (N = 2 or 3).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    dims: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl ImageGrid {
    /// Build a grid from cell counts, spacings and the physical position of
    /// the center of cell (0, …, 0). Requires at least 2 cells per axis and
    /// strictly positive spacings.
    pub fn new(dims: &[usize], spacing: &[f64], origin: &[f64]) -> Result<Self> {
        let n = dims.len();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 2 or 3, got {n}"
            )));
        }
        if spacing.len() != n || origin.len() != n {
            return Err(Error::InvalidGrid(
                "dims, spacing and origin must have the same length".into(),
            ));
        }
        for (axis, &d) in dims.iter().enumerate() {
            if d < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} has {d} cells, need at least 2"
                )));
            }
        }
        for (axis, &h) in spacing.iter().enumerate() {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} spacing {h} must be positive and finite"
                )));
            }
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            dims: dims.to_vec(),
            spacing: spacing.to_vec(),
            origin: origin.to_vec(),
        })
    }

    /// Square/cubic grid of `n` cells per axis centered on the coordinate
    /// origin, covering `[-half_extent, half_extent]` per axis.
    pub fn centered(ndim: usize, n: usize, half_extent: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 cells, got {n}")));
        }
        let h = 2.0 * half_extent / n as f64;
        let o = -half_extent + 0.5 * h;
        Self::new(&vec![n; ndim], &vec![h; ndim], &vec![o; ndim])
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Total cell count.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false // dims >= 2 per axis by construction
    }

    /// Volume (area in 2D) of a single cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Cell-center coordinate, affine in the index.
    pub fn center(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .zip(&self.spacing)
            .zip(&self.origin)
            .map(|((&i, &h), &o)| o + i as f64 * h)
            .collect()
    }

    /// Flat index of a multi-index (row-major, last axis fastest).
    pub fn flat(&self, index: &[usize]) -> usize {
        let mut f = 0usize;
        for (&i, &d) in index.iter().zip(&self.dims) {
            debug_assert!(i < d);
            f = f * d + i;
        }
        f
    }

    /// Inverse of [`flat`](Self::flat); writes into `out[..ndim]`.
    pub fn unflat(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.dims.len()).rev() {
            out[axis] = flat % self.dims[axis];
            flat /= self.dims[axis];
        }
    }

    /// Cell-center coordinate of a flat index; writes into `out[..ndim]`.
    pub fn center_of_flat(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.unflat(flat, &mut idx[..self.dims.len()]);
        for axis in 0..self.dims.len() {
            out[axis] = self.origin[axis] + idx[axis] as f64 * self.spacing[axis];
        }
    }

    /// Lower corner of the support box (cell extents included).
    pub fn support_min(&self) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.spacing)
            .map(|(&o, &h)| o - 0.5 * h)
            .collect()
    }

    /// Upper corner of the support box (cell extents included).
    pub fn support_max(&self) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.spacing)
            .zip(&self.dims)
            .map(|((&o, &h), &d)| o + (d as f64 - 0.5) * h)
            .collect()
    }

    /// Largest distance from the coordinate origin to a corner of the
    /// support box. A projection geometry with `x_max` at least this value
    /// sees the whole grid without truncation.
    pub fn circumradius(&self) -> f64 {
        let lo = self.support_min();
        let hi = self.support_max();
        let mut r2 = 0.0f64;
        for corner in 0..(1usize << self.ndim()) {
            let mut s = 0.0;
            for axis in 0..self.ndim() {
                let c = if corner >> axis & 1 == 0 { lo[axis] } else { hi[axis] };
                s += c * c;
            }
            r2 = r2.max(s);
        }
        r2.sqrt()
    }

    /// Grid covering the same region enlarged by `margin` (fraction of the
    /// per-axis extent, split equally between both sides), same spacing.
    pub fn padded(&self, margin: f64) -> Result<Self> {
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad margin {margin}")));
        }
        let mut dims = self.dims.clone();
        let mut origin = self.origin.clone();
        for axis in 0..self.ndim() {
            let extra = ((self.dims[axis] as f64 * margin) / 2.0).ceil() as usize;
            dims[axis] += 2 * extra;
            origin[axis] -= extra as f64 * self.spacing[axis];
        }
        Self::new(&dims, &self.spacing, &origin)
    }

    /// True when all axes share the same spacing (within 1e-12 relative).
    pub fn is_isotropic(&self) -> bool {
        let h0 = self.spacing[0];
        self.spacing.iter().all(|&h| (h - h0).abs() <= 1e-12 * h0)
    }

    /// Error unless `other` is the same grid. Norm comparisons and cellwise
    /// arithmetic only make sense on a shared grid; grids built from the
    /// same configuration compare bit-equal.
    pub fn expect_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )))
        }
    }
}

/// A sampled scalar density on an [`ImageGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageND {
    grid: ImageGrid,
    values: Vec<f64>,
}

impl ImageND {
    /// All-zero image.
    pub fn zeros(grid: ImageGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Wrap a value vector; rejects NaN/Inf and length mismatches.
    pub fn from_values(grid: ImageGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match cell count {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("image values".into()));
        }
        Ok(Self { grid, values })
    }

    /// Fill from a function of the cell-center coordinate.
    pub fn from_fn(grid: ImageGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        let mut p = [0.0f64; MAX_DIM];
        for (flat, v) in values.iter_mut().enumerate() {
            grid.center_of_flat(flat, &mut p);
            *v = f(&p[..grid.ndim()]);
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Cellwise linear combination `a*self + b*other` on a shared grid.
    pub fn lin_comb(&self, a: f64, other: &ImageND, b: f64) -> Result<ImageND> {
        self.grid.expect_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(ImageND {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn scale(&self, a: f64) -> ImageND {
        ImageND {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| a * v).collect(),
        }
    }

    /// Copy values from the matching region of `self` onto `target`
    /// (used to crop a padded grid back to the original one). The target
    /// cell centers must lie on source cell centers.
    pub fn crop_to(&self, target: &ImageGrid) -> Result<ImageND> {
        let n = self.grid.ndim();
        if target.ndim() != n {
            return Err(Error::GridMismatch("dimension".into()));
        }
        let mut offset = vec![0usize; n];
        for axis in 0..n {
            let h = self.grid.spacing[axis];
            if (h - target.spacing[axis]).abs() > 1e-12 * h {
                return Err(Error::GridMismatch("spacing".into()));
            }
            let shift = (target.origin[axis] - self.grid.origin[axis]) / h;
            let k = shift.round();
            if (shift - k).abs() > 1e-9 || k < 0.0 {
                return Err(Error::GridMismatch(
                    "target cells are not aligned with source cells".into(),
                ));
            }
            offset[axis] = k as usize;
            if offset[axis] + target.dims[axis] > self.grid.dims[axis] {
                return Err(Error::GridMismatch("target exceeds source".into()));
            }
        }
        let mut out = ImageND::zeros(target.clone());
        let mut idx = [0usize; MAX_DIM];
        for flat in 0..target.len() {
            target.unflat(flat, &mut idx[..n]);
            let mut src = [0usize; MAX_DIM];
            for axis in 0..n {
                src[axis] = idx[axis] + offset[axis];
            }
            out.values[flat] = self.values[self.grid.flat(&src[..n])];
        }
        Ok(out)
    }
}

/// Fast bilinear sampler over a 2D image; points outside the support
/// evaluate to zero.
pub struct Sampler2<'a> {
    dims: [usize; 2],
    inv_h: [f64; 2],
    origin: [f64; 2],
    values: &'a [f64],
}

impl<'a> Sampler2<'a> {
    pub fn new(img: &'a ImageND) -> Self {
        assert_eq!(img.grid().ndim(), 2);
        let g = img.grid();
        Self {
            dims: [g.dims()[0], g.dims()[1]],
            inv_h: [1.0 / g.spacing()[0], 1.0 / g.spacing()[1]],
            origin: [g.origin()[0], g.origin()[1]],
            values: img.values(),
        }
    }

    #[inline]
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let u = (x - self.origin[0]) * self.inv_h[0];
        let v = (y - self.origin[1]) * self.inv_h[1];
        let i0 = u.floor();
        let j0 = v.floor();
        let fu = u - i0;
        let fv = v - j0;
        let i = i0 as isize;
        let j = j0 as isize;
        let mut acc = 0.0;
        let (d0, d1) = (self.dims[0] as isize, self.dims[1] as isize);
        for (di, wi) in [(0isize, 1.0 - fu), (1, fu)] {
            let ii = i + di;
            if ii < 0 || ii >= d0 || wi == 0.0 {
                continue;
            }
            for (dj, wj) in [(0isize, 1.0 - fv), (1, fv)] {
                let jj = j + dj;
                if jj < 0 || jj >= d1 || wj == 0.0 {
                    continue;
                }
                acc += wi * wj * self.values[(ii * d1 + jj) as usize];
            }
        }
        acc
    }

    /// Bilinear corner weights at a point, for building explicit operator
    /// matrices from the same interpolation the sampler uses.
    #[inline]
    pub fn weights(&self, x: f64, y: f64, mut sink: impl FnMut(usize, f64)) {
        let u = (x - self.origin[0]) * self.inv_h[0];
        let v = (y - self.origin[1]) * self.inv_h[1];
        let i0 = u.floor();
        let j0 = v.floor();
        let fu = u - i0;
        let fv = v - j0;
        let i = i0 as isize;
        let j = j0 as isize;
        let (d0, d1) = (self.dims[0] as isize, self.dims[1] as isize);
        for (di, wi) in [(0isize, 1.0 - fu), (1, fu)] {
            let ii = i + di;
            if ii < 0 || ii >= d0 || wi == 0.0 {
                continue;
            }
            for (dj, wj) in [(0isize, 1.0 - fv), (1, fv)] {
                let jj = j + dj;
                if jj < 0 || jj >= d1 || wj == 0.0 {
                    continue;
                }
                sink((ii * d1 + jj) as usize, wi * wj);
            }
        }
    }

    /// Sampler over a bare grid with all-zero values; usable only through
    /// [`weights`](Self::weights).
    pub fn for_weights(grid: &ImageGrid) -> Sampler2<'static> {
        assert_eq!(grid.ndim(), 2);
        Sampler2 {
            dims: [grid.dims()[0], grid.dims()[1]],
            inv_h: [1.0 / grid.spacing()[0], 1.0 / grid.spacing()[1]],
            origin: [grid.origin()[0], grid.origin()[1]],
            values: &[],
        }
    }
}

/// Trilinear sampler over a 3D image; zero outside the support.
pub struct Sampler3<'a> {
    dims: [usize; 3],
    inv_h: [f64; 3],
    origin: [f64; 3],
    values: &'a [f64],
}

impl<'a> Sampler3<'a> {
    pub fn new(img: &'a ImageND) -> Self {
        assert_eq!(img.grid().ndim(), 3);
        let g = img.grid();
        Self {
            dims: [g.dims()[0], g.dims()[1], g.dims()[2]],
            inv_h: [
                1.0 / g.spacing()[0],
                1.0 / g.spacing()[1],
                1.0 / g.spacing()[2],
            ],
            origin: [g.origin()[0], g.origin()[1], g.origin()[2]],
            values: img.values(),
        }
    }

    #[inline]
    pub fn sample(&self, p: [f64; 3]) -> f64 {
        let mut base = [0isize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let u = (p[a] - self.origin[a]) * self.inv_h[a];
            let f = u.floor();
            base[a] = f as isize;
            frac[a] = u - f;
        }
        let d = [
            self.dims[0] as isize,
            self.dims[1] as isize,
            self.dims[2] as isize,
        ];
        let mut acc = 0.0;
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut flat = 0isize;
            let mut ok = true;
            for a in 0..3 {
                let bit = (corner >> a) & 1;
                let idx = base[a] + bit as isize;
                if idx < 0 || idx >= d[a] {
                    ok = false;
                    break;
                }
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * d[a] + idx;
            }
            if ok && w != 0.0 {
                acc += w * self.values[flat as usize];
            }
        }
        acc
    }

    #[inline]
    pub fn weights(&self, p: [f64; 3], mut sink: impl FnMut(usize, f64)) {
        let mut base = [0isize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let u = (p[a] - self.origin[a]) * self.inv_h[a];
            let f = u.floor();
            base[a] = f as isize;
            frac[a] = u - f;
        }
        let d = [
            self.dims[0] as isize,
            self.dims[1] as isize,
            self.dims[2] as isize,
        ];
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut flat = 0isize;
            let mut ok = true;
            for a in 0..3 {
                let bit = (corner >> a) & 1;
                let idx = base[a] + bit as isize;
                if idx < 0 || idx >= d[a] {
                    ok = false;
                    break;
                }
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * d[a] + idx;
            }
            if ok && w != 0.0 {
                sink(flat as usize, w);
            }
        }
    }

    /// Sampler over a bare grid with all-zero values; usable only through
    /// [`weights`](Self::weights).
    pub fn for_weights(grid: &ImageGrid) -> Sampler3<'static> {
        assert_eq!(grid.ndim(), 3);
        Sampler3 {
            dims: [grid.dims()[0], grid.dims()[1], grid.dims()[2]],
            inv_h: [
                1.0 / grid.spacing()[0],
                1.0 / grid.spacing()[1],
                1.0 / grid.spacing()[2],
            ],
            origin: [grid.origin()[0], grid.origin()[1], grid.origin()[2]],
            values: &[],
        }
    }
}
