//! Discrete region perimeters by face counting.
//!
//! The boundary measure of region k is the total area of grid faces
//! separating a cell labeled k from a differently labeled neighbor
//! (face adjacency). Domain boundary faces do not count: boundaries are
//! taken relative to the open domain. Each interface face lies on the
//! boundary of both touching regions, so the sum over regions counts it
//! twice; `total_interface_area` counts it once.

use super::partition::Partition;
use crate::grid::ImageGrid;

/// Per-region boundary areas.
pub fn discrete_perimeter(p: &Partition, grid: &ImageGrid) -> Vec<f64> {
    let mut per_region = vec![0.0; p.m()];
    for_each_interface(p, grid, |a, b, area| {
        per_region[a as usize] += area;
        per_region[b as usize] += area;
    });
    per_region
}

/// Total interface area, each face counted once.
pub fn total_interface_area(p: &Partition, grid: &ImageGrid) -> f64 {
    let mut total = 0.0;
    for_each_interface(p, grid, |_, _, area| total += area);
    total
}

/// Sum over regions of the boundary measure (each interface twice); this
/// is the perimeter term the reconstruction energy uses.
pub fn perimeter_sum(p: &Partition, grid: &ImageGrid) -> f64 {
    2.0 * total_interface_area(p, grid)
}

/// Area of a face orthogonal to `axis`.
pub fn face_area(grid: &ImageGrid, axis: usize) -> f64 {
    grid.spacing()
        .iter()
        .enumerate()
        .filter(|&(a, _)| a != axis)
        .map(|(_, &h)| h)
        .product()
}

fn for_each_interface(p: &Partition, grid: &ImageGrid, mut visit: impl FnMut(u32, u32, f64)) {
    debug_assert_eq!(p.labels().len(), grid.len());
    let ndim = grid.ndim();
    let labels = p.labels();
    let mut idx = [0usize; 3];
    for axis in 0..ndim {
        let area = face_area(grid, axis);
        let stride: usize = grid.dims()[axis + 1..].iter().product();
        for flat in 0..grid.len() {
            grid.unflat(flat, &mut idx[..ndim]);
            if idx[axis] + 1 >= grid.dims()[axis] {
                continue;
            }
            let a = labels[flat];
            let b = labels[flat + stride];
            if a != b {
                visit(a, b, area);
            }
        }
    }
}
