//! Sampled projection data on the quotient offset/direction lattice.

use super::geometry::ProjectionGeometry;
use crate::error::{Error, Result};

/// Projection data g(X, xi) stored on the quotient lattice of
/// [`ProjectionGeometry`], direction-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    geometry: ProjectionGeometry,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(geometry: ProjectionGeometry) -> Self {
        let n = geometry.n_samples();
        Self {
            geometry,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(geometry: ProjectionGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.n_samples() {
            return Err(Error::GeometryMismatch(format!(
                "value count {} does not match sample count {}",
                values.len(),
                geometry.n_samples()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sinogram values".into()));
        }
        Ok(Self { geometry, values })
    }

    pub fn geometry(&self) -> &ProjectionGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn value(&self, d: usize, o: usize) -> f64 {
        self.values[self.geometry.sample_index(d, o)]
    }

    /// Cellwise linear combination on a shared geometry.
    pub fn lin_comb(&self, a: f64, other: &Sinogram, b: f64) -> Result<Sinogram> {
        self.geometry.expect_same(&other.geometry)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Sinogram {
            geometry: self.geometry.clone(),
            values,
        })
    }

    /// Expand the quotient storage to the full double covering: every
    /// stored sample (X, xi, v) is listed together with its antipodal twin
    /// (-X, -xi, v). The evenness identity g(X, xi) = g(-X, -xi) therefore
    /// holds exactly by construction.
    pub fn expand_full_covering(&self) -> Vec<(f64, Vec<f64>, f64)> {
        let geom = &self.geometry;
        let mut out = Vec::with_capacity(2 * geom.n_samples());
        for d in 0..geom.n_directions() {
            let xi: Vec<f64> = match geom.ndim() {
                2 => geom.dir2(d).to_vec(),
                _ => geom.dir3(d).to_vec(),
            };
            let neg: Vec<f64> = xi.iter().map(|c| -c).collect();
            for o in 0..geom.n_offsets() {
                let x = geom.offset(o);
                let v = self.value(d, o);
                out.push((x, xi.clone(), v));
                out.push((-x, neg.clone(), v));
            }
        }
        out
    }
}
