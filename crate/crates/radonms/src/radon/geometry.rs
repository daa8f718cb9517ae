//! Hyperplane parametrization for projection data.
//!
//! A hyperplane is written as {x : X = xi . x} with signed offset X and unit
//! normal xi. The pairs (X, xi) and (-X, -xi) describe the same hyperplane,
//! so sampled data is stored on a quotient lattice: one representative
//! direction per antipodal pair, all signed offsets. Expanding the stored
//! values to the full (X, xi) covering satisfies g(X, xi) = g(-X, -xi) by
//! construction.

use crate::error::{Error, Result};

/// Direction samples covering the quotient of the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionSet {
    /// 2D: `count` angles uniform in [0, pi), direction i at angle
    /// i*pi/count, each carrying weight pi/count.
    UniformAngles2 { count: usize },
    /// 3D: explicit unit vectors with quadrature weights. The weights
    /// approximate the area measure of a half sphere, so they should sum
    /// to 2*pi for an unbiased direction average.
    Hemisphere3 {
        dirs: Vec<[f64; 3]>,
        weights: Vec<f64>,
    },
}

/// Offset/direction lattice for sinograms.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionGeometry {
    n_offsets: usize,
    x_max: f64,
    directions: DirectionSet,
}

impl ProjectionGeometry {
    /// Parallel-beam 2D geometry: `n_offsets` offsets spanning
    /// [-x_max, x_max] inclusive, `n_angles` uniform angles in [0, pi).
    pub fn new_2d(n_offsets: usize, x_max: f64, n_angles: usize) -> Result<Self> {
        if n_angles == 0 {
            return Err(Error::InvalidGeometry("need at least one angle".into()));
        }
        Self::validated(
            n_offsets,
            x_max,
            DirectionSet::UniformAngles2 { count: n_angles },
        )
    }

    /// 3D geometry from an explicit direction list with quadrature weights.
    pub fn new_3d(
        n_offsets: usize,
        x_max: f64,
        dirs: Vec<[f64; 3]>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if dirs.is_empty() {
            return Err(Error::InvalidGeometry("need at least one direction".into()));
        }
        if dirs.len() != weights.len() {
            return Err(Error::InvalidGeometry(
                "direction and weight counts differ".into(),
            ));
        }
        for (i, d) in dirs.iter().enumerate() {
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidGeometry(format!(
                    "direction {i} has norm {norm}, must be unit within 1e-12"
                )));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "direction {i} has nonpositive weight {w}"
                )));
            }
        }
        // No antipodal duplicates: the lattice must cover each hyperplane
        // family exactly once.
        for i in 0..dirs.len() {
            for j in (i + 1)..dirs.len() {
                let s = [
                    dirs[i][0] + dirs[j][0],
                    dirs[i][1] + dirs[j][1],
                    dirs[i][2] + dirs[j][2],
                ];
                if (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt() < 1e-9 {
                    return Err(Error::InvalidGeometry(format!(
                        "directions {i} and {j} are antipodal duplicates"
                    )));
                }
            }
        }
        Self::validated(n_offsets, x_max, DirectionSet::Hemisphere3 { dirs, weights })
    }

    /// Default 3D direction generator: Fibonacci lattice on the upper
    /// hemisphere with equal weights 2*pi/n.
    pub fn fibonacci_3d(n_offsets: usize, x_max: f64, n_dirs: usize) -> Result<Self> {
        let (dirs, weights) = fibonacci_hemisphere(n_dirs);
        Self::new_3d(n_offsets, x_max, dirs, weights)
    }

    fn validated(n_offsets: usize, x_max: f64, directions: DirectionSet) -> Result<Self> {
        if n_offsets < 2 {
            return Err(Error::InvalidGeometry(format!(
                "need at least 2 offsets, got {n_offsets}"
            )));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidGeometry(format!("bad x_max {x_max}")));
        }
        Ok(Self {
            n_offsets,
            x_max,
            directions,
        })
    }

    pub fn ndim(&self) -> usize {
        match self.directions {
            DirectionSet::UniformAngles2 { .. } => 2,
            DirectionSet::Hemisphere3 { .. } => 3,
        }
    }

    pub fn n_offsets(&self) -> usize {
        self.n_offsets
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn n_directions(&self) -> usize {
        match &self.directions {
            DirectionSet::UniformAngles2 { count } => *count,
            DirectionSet::Hemisphere3 { dirs, .. } => dirs.len(),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_directions() * self.n_offsets
    }

    /// Offset lattice spacing; offsets span [-x_max, x_max] inclusive.
    pub fn offset_spacing(&self) -> f64 {
        2.0 * self.x_max / (self.n_offsets as f64 - 1.0)
    }

    pub fn offset(&self, o: usize) -> f64 {
        -self.x_max + o as f64 * self.offset_spacing()
    }

    /// Direction `d` as a unit 2-vector (2D geometries only).
    pub fn dir2(&self, d: usize) -> [f64; 2] {
        match &self.directions {
            DirectionSet::UniformAngles2 { count } => {
                let theta = self.angle(d, *count);
                [theta.cos(), theta.sin()]
            }
            _ => panic!("dir2 called on a 3D geometry"),
        }
    }

    fn angle(&self, d: usize, count: usize) -> f64 {
        d as f64 * std::f64::consts::PI / count as f64
    }

    /// Direction `d` as a unit 3-vector (3D geometries only).
    pub fn dir3(&self, d: usize) -> [f64; 3] {
        match &self.directions {
            DirectionSet::Hemisphere3 { dirs, .. } => dirs[d],
            _ => panic!("dir3 called on a 2D geometry"),
        }
    }

    /// Quadrature weight of direction `d` over the half sphere.
    pub fn dir_weight(&self, d: usize) -> f64 {
        match &self.directions {
            DirectionSet::UniformAngles2 { count } => std::f64::consts::PI / *count as f64,
            DirectionSet::Hemisphere3 { weights, .. } => weights[d],
        }
    }

    /// Sum of direction weights: the measure of the stored half of the
    /// sphere (pi in 2D, about 2*pi in 3D).
    pub fn half_sphere_measure(&self) -> f64 {
        match &self.directions {
            DirectionSet::UniformAngles2 { .. } => std::f64::consts::PI,
            DirectionSet::Hemisphere3 { weights, .. } => weights.iter().sum(),
        }
    }

    /// Measure of the full sphere of directions implied by the quotient
    /// storage: twice the stored half. This is the constant `c_geom`
    /// relating the sinogram inner product to the direction-averaged back
    /// projection: <Rf, g>_sino = c_geom * <f, Ig>_image.
    pub fn full_sphere_measure(&self) -> f64 {
        2.0 * self.half_sphere_measure()
    }

    /// Flat sample index, direction-major.
    pub fn sample_index(&self, d: usize, o: usize) -> usize {
        debug_assert!(o < self.n_offsets);
        d * self.n_offsets + o
    }

    pub fn expect_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!(
                "{} directions x {} offsets vs {} x {}",
                self.n_directions(),
                self.n_offsets,
                other.n_directions(),
                other.n_offsets
            )))
        }
    }
}

/// Fibonacci lattice on the upper hemisphere (z > 0): nearly uniform
/// coverage, equal quadrature weights 2*pi/n.
pub fn fibonacci_hemisphere(n: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let mut dirs = Vec::with_capacity(n);
    for j in 0..n {
        let z = (j as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = j as f64 * golden;
        let mut d = [r * phi.cos(), r * phi.sin(), z];
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        for c in &mut d {
            *c /= norm;
        }
        dirs.push(d);
    }
    let w = 2.0 * std::f64::consts::PI / n as f64;
    (dirs, vec![w; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_symmetric() {
        let g = ProjectionGeometry::new_2d(9, 2.0, 4).unwrap();
        for o in 0..9 {
            assert!((g.offset(o) + g.offset(8 - o)).abs() < 1e-15);
        }
        assert!((g.offset(0) + 2.0).abs() < 1e-15);
        assert!((g.offset(8) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn angle_weights_sum_to_half_circle() {
        let g = ProjectionGeometry::new_2d(5, 1.0, 7).unwrap();
        let total: f64 = (0..7).map(|d| g.dir_weight(d)).sum();
        assert!((total - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_dirs_are_unit_and_upper() {
        let (dirs, weights) = fibonacci_hemisphere(64);
        for d in &dirs {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
            assert!(d[2] > 0.0);
        }
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn rejects_antipodal_duplicates() {
        let dirs = vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];
        let err = ProjectionGeometry::new_3d(5, 1.0, dirs, vec![1.0, 1.0]);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_non_unit_direction() {
        let dirs = vec![[0.9, 0.0, 0.0]];
        assert!(ProjectionGeometry::new_3d(5, 1.0, dirs, vec![1.0]).is_err());
    }
}
