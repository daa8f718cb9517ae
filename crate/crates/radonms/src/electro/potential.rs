//! Newtonian potentials of compact 3D charge densities.
//!
//! Two independent routes compute the same potential:
//!
//! * convolution with the 1/|x| kernel by zero-padded FFT, with the
//!   singular origin cell replaced by the analytic cell average of 1/|x|;
//! * projection/back-projection: the direction-averaged back projection
//!   of the forward projection of f equals, up to the constant
//!   a_3 = 2 pi, the same convolution.
//!
//! The overall normalization phi = (1/(4 pi)) f * (1/|x|) makes
//! f = -Lap phi hold without further constants.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::field::ScalarField3;
use crate::error::{Error, Result};
use crate::grid::ImageND;
use crate::radon::{back_project, forward_project, ProjectionGeometry};

/// Fraction of (2 pi)^2 appearing in the potential normalization:
/// phi = (1 / (2 (2 pi)^2)) I_sphere(R f) = (1 / (4 pi)) f * (1/|x|).
pub const POTENTIAL_NORMALIZATION: f64 = 1.0 / (4.0 * std::f64::consts::PI);

/// Potential of a compactly supported density by zero-padded FFT
/// convolution with 1/|x|. The density must not touch the grid boundary
/// (relative boundary magnitude above 1e-6 of the peak is rejected), so
/// pad the grid when rasterizing.
pub fn potential_from_density(f: &ImageND) -> Result<ScalarField3> {
    if f.grid().ndim() != 3 {
        return Err(Error::InvalidGrid("potentials are computed on 3D grids".into()));
    }
    check_compact_support(f)?;
    let grid = f.grid();
    let dims = [grid.dims()[0], grid.dims()[1], grid.dims()[2]];
    let ext = [2 * dims[0], 2 * dims[1], 2 * dims[2]];
    let total: usize = ext.iter().product();

    let mut density = vec![Complex64::new(0.0, 0.0); total];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let src = (i * dims[1] + j) * dims[2] + k;
                let dst = (i * ext[1] + j) * ext[2] + k;
                density[dst] = Complex64::new(f.values()[src], 0.0);
            }
        }
    }

    let h = [grid.spacing()[0], grid.spacing()[1], grid.spacing()[2]];
    let mut kernel = vec![Complex64::new(0.0, 0.0); total];
    let origin_avg = newton_kernel_cell_average(h);
    for i in 0..ext[0] {
        let oi = signed_offset(i, ext[0]) as f64 * h[0];
        for j in 0..ext[1] {
            let oj = signed_offset(j, ext[1]) as f64 * h[1];
            for k in 0..ext[2] {
                let ok = signed_offset(k, ext[2]) as f64 * h[2];
                let r = (oi * oi + oj * oj + ok * ok).sqrt();
                let v = if r == 0.0 { origin_avg } else { 1.0 / r };
                kernel[(i * ext[1] + j) * ext[2] + k] = Complex64::new(v, 0.0);
            }
        }
    }

    let ext_dims = ext.to_vec();
    fft3(&mut density, &ext_dims, true);
    fft3(&mut kernel, &ext_dims, true);
    for (d, k) in density.iter_mut().zip(&kernel) {
        *d *= *k;
    }
    fft3(&mut density, &ext_dims, false);

    let scale = POTENTIAL_NORMALIZATION * grid.cell_volume() / total as f64;
    let mut out = vec![0.0; grid.len()];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let src = (i * ext[1] + j) * ext[2] + k;
                let dst = (i * dims[1] + j) * dims[2] + k;
                out[dst] = density[src].re * scale;
            }
        }
    }
    ImageND::from_values(grid.clone(), out)
}

/// Potential via the projection pair: (1 / (2 (2 pi)^2)) I_sphere(R f),
/// with I_sphere realized as the direction average times the sphere
/// measure of the geometry.
pub fn potential_via_projection(
    f: &ImageND,
    geom: &ProjectionGeometry,
) -> Result<ScalarField3> {
    if f.grid().ndim() != 3 || geom.ndim() != 3 {
        return Err(Error::InvalidGrid("projection potentials are 3D".into()));
    }
    let g = forward_project(f, geom)?;
    let bp = back_project(&g, f.grid())?;
    let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
    let c = geom.full_sphere_measure() / (2.0 * two_pi_sq);
    Ok(bp.image.scale(c))
}

fn check_compact_support(f: &ImageND) -> Result<()> {
    let grid = f.grid();
    let dims = [grid.dims()[0], grid.dims()[1], grid.dims()[2]];
    let peak = f.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(());
    }
    let mut idx = [0usize; 3];
    let mut boundary_peak = 0.0f64;
    for (flat, &v) in f.values().iter().enumerate() {
        grid.unflat(flat, &mut idx);
        let on_boundary = (0..3).any(|a| idx[a] == 0 || idx[a] == dims[a] - 1);
        if on_boundary {
            boundary_peak = boundary_peak.max(v.abs());
        }
    }
    if boundary_peak > 1e-6 * peak {
        return Err(Error::InvalidGrid(format!(
            "density reaches the grid boundary (boundary/peak = {:.2e}); enlarge the grid padding",
            boundary_peak / peak
        )));
    }
    Ok(())
}

fn signed_offset(i: usize, n: usize) -> isize {
    if i <= n / 2 {
        i as isize
    } else {
        i as isize - n as isize
    }
}

/// Analytic cell average of 1/|x| over the origin-centered cell, from the
/// closed-form antiderivative of the Newton kernel over a box:
///
/// F(x,y,z) = xy ln(z+r) + yz ln(x+r) + zx ln(y+r)
///          - x^2/2 atan(yz/(x r)) - y^2/2 atan(zx/(y r)) - z^2/2 atan(xy/(z r))
///
/// integrated over [0,a]x[0,b]x[0,c] by the alternating corner sum; the
/// centered cell is 8 copies of the positive octant box.
pub fn newton_kernel_cell_average(h: [f64; 3]) -> f64 {
    let (a, b, c) = (0.5 * h[0], 0.5 * h[1], 0.5 * h[2]);
    let f = |x: f64, y: f64, z: f64| -> f64 {
        let r = (x * x + y * y + z * z).sqrt();
        let mut acc = 0.0;
        if x > 0.0 && y > 0.0 {
            acc += x * y * (z + r).ln();
        }
        if y > 0.0 && z > 0.0 {
            acc += y * z * (x + r).ln();
        }
        if z > 0.0 && x > 0.0 {
            acc += z * x * (y + r).ln();
        }
        if x > 0.0 {
            acc -= 0.5 * x * x * (y * z / (x * r)).atan();
        }
        if y > 0.0 {
            acc -= 0.5 * y * y * (z * x / (y * r)).atan();
        }
        if z > 0.0 {
            acc -= 0.5 * z * z * (x * y / (z * r)).atan();
        }
        acc
    };
    let mut integral = 0.0;
    for mask in 0..8usize {
        let x = if mask & 1 == 1 { a } else { 0.0 };
        let y = if mask & 2 == 2 { b } else { 0.0 };
        let z = if mask & 4 == 4 { c } else { 0.0 };
        // Inclusion-exclusion parity: the all-upper corner enters with +1.
        let s = if (3 - mask.count_ones() as i32) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        integral += s * f(x, y, z);
    }
    8.0 * integral / (h[0] * h[1] * h[2])
}

fn fft3(data: &mut [Complex64], dims: &[usize], forward: bool) {
    let mut planner = FftPlanner::new();
    let total: usize = dims.iter().product();
    for axis in 0..dims.len() {
        let d = dims[axis];
        let fft = if forward {
            planner.plan_fft_forward(d)
        } else {
            planner.plan_fft_inverse(d)
        };
        let stride: usize = dims[axis + 1..].iter().product();
        let block = stride * d;
        let mut line = vec![Complex64::new(0.0, 0.0); d];
        for base in 0..(total / block) {
            for inner in 0..stride {
                let start = base * block + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process(&mut line);
                for (j, &v) in line.iter().enumerate() {
                    data[start + j * stride] = v;
                }
            }
        }
    }
}
