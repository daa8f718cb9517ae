//! Optimal region values for a fixed partition.
//!
//! With the partition frozen, the fidelity is quadratic in the value
//! vector: minimizing ||sum_k f_k R chi_k - g||^2 reduces to the m x m
//! normal equations with Gram matrix G_jk = <R chi_j, R chi_k>. A tiny
//! ridge keeps near-duplicate regions solvable; with a zero ridge a
//! singular Gram is reported as an error instead.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::cache::ProjectionCache;
use super::partition::Partition;
use crate::error::{Error, Result};
use crate::radon::Sinogram;

/// Projections of the region indicators, reusable across value fits and
/// residual updates.
pub fn region_projections(p: &Partition, cache: &ProjectionCache) -> Vec<Vec<f64>> {
    (0..p.m())
        .map(|k| cache.project_indicator(|cell| p.labels()[cell] == k as u32))
        .collect()
}

/// Least-squares value fit. Returns the unique minimizer of the fidelity
/// (plus `ridge` times the squared value norm).
pub fn fit_values(
    p: &Partition,
    g: &Sinogram,
    ridge: f64,
    cache: &ProjectionCache,
) -> Result<Vec<f64>> {
    cache.geometry().expect_same(g.geometry())?;
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "ridge must be nonnegative, got {ridge}"
        )));
    }
    let regions = region_projections(p, cache);
    fit_values_from_projections(&regions, g, ridge, cache)
}

pub(crate) fn fit_values_from_projections(
    regions: &[Vec<f64>],
    g: &Sinogram,
    ridge: f64,
    cache: &ProjectionCache,
) -> Result<Vec<f64>> {
    let m = regions.len();
    let mut gram = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for j in 0..m {
        for k in j..m {
            let v = cache.weighted_dot(&regions[j], &regions[k]);
            gram[(j, k)] = v;
            gram[(k, j)] = v;
        }
        rhs[j] = cache.weighted_dot(&regions[j], g.values());
    }
    for j in 0..m {
        gram[(j, j)] += ridge;
    }
    match Cholesky::new(gram) {
        Some(chol) => {
            let x = chol.solve(&rhs);
            Ok(x.data.into())
        }
        None => Err(Error::SingularGram),
    }
}

/// Default ridge: 1e-10 trace(G)/m, scale-free and far below the
/// fidelity resolution of honest fixtures.
pub fn default_ridge(p: &Partition, cache: &ProjectionCache) -> f64 {
    let regions = region_projections(p, cache);
    let trace: f64 = regions
        .iter()
        .map(|r| cache.weighted_dot(r, r))
        .sum();
    1e-10 * trace / p.m().max(1) as f64
}
