//! Discrete forward projection: integrals of a sampled density over the
//! hyperplane lattice of a [`ProjectionGeometry`].
//!
//! Each hyperplane is integrated by sampling it at a sub-cell step (half
//! the minimum grid spacing) with multilinear interpolation of the image.
//! The quadrature weights are nonnegative and sum, per hyperplane, to the
//! exact length (2D) or area (3D) of its intersection with the grid
//! bounding box; the map is linear in the image values.

use rayon::prelude::*;

use super::geometry::ProjectionGeometry;
use super::sinogram::Sinogram;
use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND, Sampler2, Sampler3};

/// Forward Radon transform of `f` on the lattice of `geom`.
///
/// Rejects geometries whose offset range does not cover the grid support:
/// truncated forward data would silently break the inversion identities.
pub fn forward_project(f: &ImageND, geom: &ProjectionGeometry) -> Result<Sinogram> {
    check_dim_and_coverage(f.grid(), geom)?;
    let step = 0.5 * f.grid().min_spacing();
    let n_off = geom.n_offsets();

    let rows: Vec<Vec<f64>> = (0..geom.n_directions())
        .into_par_iter()
        .map(|d| {
            let mut row = vec![0.0; n_off];
            match geom.ndim() {
                2 => {
                    let sampler = Sampler2::new(f);
                    let xi = geom.dir2(d);
                    for (o, out) in row.iter_mut().enumerate() {
                        let x_off = geom.offset(o);
                        let mut acc = 0.0;
                        for_each_line_sample(f.grid(), xi, x_off, step, |p, w| {
                            acc += w * sampler.sample(p[0], p[1]);
                        });
                        *out = acc;
                    }
                }
                _ => {
                    let sampler = Sampler3::new(f);
                    let xi = geom.dir3(d);
                    for (o, out) in row.iter_mut().enumerate() {
                        let x_off = geom.offset(o);
                        let mut acc = 0.0;
                        for_each_plane_sample(f.grid(), xi, x_off, step, |p, w| {
                            acc += w * sampler.sample(p);
                        });
                        *out = acc;
                    }
                }
            }
            row
        })
        .collect();

    let mut values = Vec::with_capacity(geom.n_samples());
    for row in rows {
        values.extend_from_slice(&row);
    }
    Sinogram::from_values(geom.clone(), values)
}

/// Quadrature weights of one sinogram sample spread onto grid cells via
/// the same interpolation the matrix-free projector uses. `sink` receives
/// `(flat cell index, weight)` pairs; a cell may appear more than once.
pub(crate) fn row_weights(
    grid: &ImageGrid,
    geom: &ProjectionGeometry,
    d: usize,
    o: usize,
    mut sink: impl FnMut(usize, f64),
) {
    let step = 0.5 * grid.min_spacing();
    let x_off = geom.offset(o);
    match geom.ndim() {
        2 => {
            let w2 = Sampler2::for_weights(grid);
            let xi = geom.dir2(d);
            for_each_line_sample(grid, xi, x_off, step, |p, w| {
                w2.weights(p[0], p[1], |cell, iw| sink(cell, w * iw));
            });
        }
        _ => {
            let w3 = Sampler3::for_weights(grid);
            let xi = geom.dir3(d);
            for_each_plane_sample(grid, xi, x_off, step, |p, w| {
                w3.weights(p, |cell, iw| sink(cell, w * iw));
            });
        }
    }
}

pub(crate) fn check_dim_and_coverage(grid: &ImageGrid, geom: &ProjectionGeometry) -> Result<()> {
    if grid.ndim() != geom.ndim() {
        return Err(Error::GeometryMismatch(format!(
            "{}D grid vs {}D geometry",
            grid.ndim(),
            geom.ndim()
        )));
    }
    let r = grid.circumradius();
    if geom.x_max() < r * (1.0 - 1e-12) {
        return Err(Error::Truncated(format!(
            "grid circumradius {r} exceeds x_max {}",
            geom.x_max()
        )));
    }
    Ok(())
}

/// Visit midpoint samples of the segment where the line
/// {p : xi . p = x_off} crosses the grid support box. Weights sum to the
/// chord length exactly.
fn for_each_line_sample(
    grid: &ImageGrid,
    xi: [f64; 2],
    x_off: f64,
    step: f64,
    mut visit: impl FnMut([f64; 2], f64),
) {
    let lo = grid.support_min();
    let hi = grid.support_max();
    // Line p(t) = x_off * xi + t * eta, eta the unit tangent.
    let base = [x_off * xi[0], x_off * xi[1]];
    let eta = [-xi[1], xi[0]];
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for a in 0..2 {
        if eta[a].abs() < 1e-300 {
            if base[a] < lo[a] || base[a] > hi[a] {
                return;
            }
        } else {
            let u = (lo[a] - base[a]) / eta[a];
            let v = (hi[a] - base[a]) / eta[a];
            let (tmin, tmax) = if u < v { (u, v) } else { (v, u) };
            t0 = t0.max(tmin);
            t1 = t1.min(tmax);
        }
    }
    if t1 <= t0 {
        return;
    }
    let len = t1 - t0;
    let n = (len / step).ceil().max(1.0) as usize;
    let w = len / n as f64;
    for k in 0..n {
        let t = t0 + (k as f64 + 0.5) * w;
        visit([base[0] + t * eta[0], base[1] + t * eta[1]], w);
    }
}

/// Visit lattice samples of the polygon where the plane
/// {p : xi . p = x_off} crosses the grid support box. Weights sum to the
/// exact polygon area.
fn for_each_plane_sample(
    grid: &ImageGrid,
    xi: [f64; 3],
    x_off: f64,
    step: f64,
    mut visit: impl FnMut([f64; 3], f64),
) {
    let lo3 = grid.support_min();
    let hi3 = grid.support_max();
    let lo = [lo3[0], lo3[1], lo3[2]];
    let hi = [hi3[0], hi3[1], hi3[2]];
    let Some(section) = plane_box_section(xi, x_off, lo, hi) else {
        return;
    };
    // In-plane orthonormal frame anchored at the foot of the offset.
    let origin = [x_off * xi[0], x_off * xi[1], x_off * xi[2]];
    let (e1, e2) = plane_basis(xi);
    let mut umin = f64::INFINITY;
    let mut umax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for p in &section.vertices {
        let r = [p[0] - origin[0], p[1] - origin[1], p[2] - origin[2]];
        let u = dot3(r, e1);
        let v = dot3(r, e2);
        umin = umin.min(u);
        umax = umax.max(u);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let eps = 1e-12 * (1.0 + hi.iter().fold(0.0f64, |m, &c| m.max(c.abs())));
    let nu = (((umax - umin) / step).ceil() as usize).max(1);
    let nv = (((vmax - vmin) / step).ceil() as usize).max(1);
    // First pass counts interior samples so that the weight normalizes the
    // quadrature to the exact section area.
    let mut inside = 0usize;
    let scan = |hit: &mut dyn FnMut([f64; 3])| {
        for iu in 0..nu {
            let u = umin + (iu as f64 + 0.5) * (umax - umin) / nu as f64;
            for iv in 0..nv {
                let v = vmin + (iv as f64 + 0.5) * (vmax - vmin) / nv as f64;
                let p = [
                    origin[0] + u * e1[0] + v * e2[0],
                    origin[1] + u * e1[1] + v * e2[1],
                    origin[2] + u * e1[2] + v * e2[2],
                ];
                if (0..3).all(|a| p[a] >= lo[a] - eps && p[a] <= hi[a] + eps) {
                    hit(p);
                }
            }
        }
    };
    scan(&mut |_p| inside += 1);
    if inside == 0 {
        // Sliver section thinner than the lattice: one centroid sample.
        visit(section.centroid, section.area);
        return;
    }
    let w = section.area / inside as f64;
    scan(&mut |p| visit(p, w));
}

struct PlaneSection {
    vertices: Vec<[f64; 3]>,
    centroid: [f64; 3],
    area: f64,
}

/// Exact polygon of intersection between the plane {xi . p = x_off} and an
/// axis-aligned box, or None when they miss each other.
fn plane_box_section(xi: [f64; 3], x_off: f64, lo: [f64; 3], hi: [f64; 3]) -> Option<PlaneSection> {
    let corner = |mask: usize| -> [f64; 3] {
        let mut c = [0.0; 3];
        for (a, slot) in c.iter_mut().enumerate() {
            *slot = if mask >> a & 1 == 0 { lo[a] } else { hi[a] };
        }
        c
    };
    let scale = (0..3).map(|a| hi[a] - lo[a]).fold(0.0f64, f64::max);
    let mut verts: Vec<[f64; 3]> = Vec::new();
    let mut push = |p: [f64; 3]| {
        let tol = 1e-10 * (1.0 + scale);
        if !verts.iter().any(|q| {
            (q[0] - p[0]).abs() < tol && (q[1] - p[1]).abs() < tol && (q[2] - p[2]).abs() < tol
        }) {
            verts.push(p);
        }
    };
    // The 12 box edges connect corner masks differing in one bit.
    for mask in 0..8usize {
        for axis in 0..3usize {
            if mask >> axis & 1 == 1 {
                continue;
            }
            let a = corner(mask);
            let b = corner(mask | (1 << axis));
            let da = dot3(a, xi) - x_off;
            let db = dot3(b, xi) - x_off;
            if da == 0.0 {
                push(a);
            }
            if db == 0.0 {
                push(b);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let t = da / (da - db);
                push([
                    a[0] + t * (b[0] - a[0]),
                    a[1] + t * (b[1] - a[1]),
                    a[2] + t * (b[2] - a[2]),
                ]);
            }
        }
    }
    if verts.len() < 3 {
        return None;
    }
    let mut centroid = [0.0; 3];
    for p in &verts {
        for a in 0..3 {
            centroid[a] += p[a] / verts.len() as f64;
        }
    }
    let (e1, e2) = plane_basis(xi);
    let mut order: Vec<(f64, usize)> = verts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let r = [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]];
            (dot3(r, e2).atan2(dot3(r, e1)), i)
        })
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let sorted: Vec<[f64; 3]> = order.iter().map(|&(_, i)| verts[i]).collect();
    // Shoelace in the (e1, e2) frame.
    let mut area = 0.0;
    for i in 0..sorted.len() {
        let p = sorted[i];
        let q = sorted[(i + 1) % sorted.len()];
        let rp = [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]];
        let rq = [q[0] - centroid[0], q[1] - centroid[1], q[2] - centroid[2]];
        area += dot3(rp, e1) * dot3(rq, e2) - dot3(rq, e1) * dot3(rp, e2);
    }
    let area = 0.5 * area.abs();
    if area <= 0.0 {
        return None;
    }
    Some(PlaneSection {
        vertices: sorted,
        centroid,
        area,
    })
}

/// Deterministic orthonormal basis of the plane orthogonal to `xi`.
fn plane_basis(xi: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Cross with the axis least aligned with xi for stability.
    let axis = if xi[0].abs() <= xi[1].abs() && xi[0].abs() <= xi[2].abs() {
        [1.0, 0.0, 0.0]
    } else if xi[1].abs() <= xi[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let mut e1 = cross3(xi, axis);
    let n1 = dot3(e1, e1).sqrt();
    for c in &mut e1 {
        *c /= n1;
    }
    let e2 = cross3(xi, e1);
    (e1, e2)
}

#[inline]
fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_weights_sum_to_length() {
        let grid = ImageGrid::centered(2, 16, 1.0).unwrap();
        // Horizontal line through the middle: chord length 2.
        let mut total = 0.0;
        for_each_line_sample(&grid, [0.0, 1.0], 0.25, 0.01, |_, w| total += w);
        assert!((total - 2.0).abs() < 1e-12);
        // Line missing the box entirely.
        let mut hits = 0;
        for_each_line_sample(&grid, [1.0, 0.0], 5.0, 0.01, |_, _| hits += 1);
        assert_eq!(hits, 0);
    }

    #[test]
    fn plane_section_of_cube_through_center() {
        // Unit cube, plane z = 0: section is the full 1 x 1 face shape.
        let lo = [-0.5, -0.5, -0.5];
        let hi = [0.5, 0.5, 0.5];
        let s = plane_box_section([0.0, 0.0, 1.0], 0.0, lo, hi).unwrap();
        assert!((s.area - 1.0).abs() < 1e-12);
        // Diagonal plane x + y + z = 0 cuts a regular hexagon with side
        // sqrt(2)/2, area (3*sqrt(3)/2) * side^2 = 3*sqrt(3)/4.
        let n = 1.0 / 3.0f64.sqrt();
        let hexa = plane_box_section([n, n, n], 0.0, lo, hi).unwrap();
        let expect_area = 0.75 * 3.0f64.sqrt();
        assert!(
            (hexa.area - expect_area).abs() < 1e-10,
            "hexagon area {} vs {}",
            hexa.area,
            expect_area
        );
        // Plane far outside misses.
        assert!(plane_box_section([0.0, 0.0, 1.0], 2.0, lo, hi).is_none());
    }

    #[test]
    fn plane_weights_sum_to_section_area() {
        let grid = ImageGrid::centered(3, 8, 1.0).unwrap();
        let n = 1.0 / 2.0f64.sqrt();
        let mut total = 0.0;
        for_each_plane_sample(&grid, [n, n, 0.0], 0.3, 0.05, |_, w| total += w);
        let lo = [-1.0, -1.0, -1.0];
        let hi = [1.0, 1.0, 1.0];
        let area = plane_box_section([n, n, 0.0], 0.3, lo, hi).unwrap().area;
        assert!((total - area).abs() < 1e-9 * area.max(1.0));
    }

    #[test]
    fn zero_image_projects_to_zero() {
        let grid = ImageGrid::centered(2, 16, 1.0).unwrap();
        let f = ImageND::zeros(grid.clone());
        let geom = ProjectionGeometry::new_2d(21, grid.circumradius() * 1.05, 12).unwrap();
        let g = forward_project(&f, &geom).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn truncated_geometry_is_rejected() {
        let grid = ImageGrid::centered(2, 16, 1.0).unwrap();
        let f = ImageND::zeros(grid);
        let geom = ProjectionGeometry::new_2d(21, 0.5, 12).unwrap();
        assert!(matches!(
            forward_project(&f, &geom),
            Err(Error::Truncated(_))
        ));
    }
}
