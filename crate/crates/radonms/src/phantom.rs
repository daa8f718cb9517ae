//! Synthetic test densities: additive ellipse/ellipsoid components
//! rasterized by cell-center point sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND};

/// One additive component: an ellipse (2D) or ellipsoid (3D) with a
/// rotation in the x-y plane, adding `value` inside its boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhantomComponent {
    pub center: Vec<f64>,
    pub semi_axes: Vec<f64>,
    /// Rotation angle in radians, applied in the x-y plane.
    #[serde(default)]
    pub angle: f64,
    pub value: f64,
}

impl PhantomComponent {
    pub fn ellipse(center: [f64; 2], semi_axes: [f64; 2], angle: f64, value: f64) -> Self {
        Self {
            center: center.to_vec(),
            semi_axes: semi_axes.to_vec(),
            angle,
            value,
        }
    }

    pub fn ellipsoid(center: [f64; 3], semi_axes: [f64; 3], angle: f64, value: f64) -> Self {
        Self {
            center: center.to_vec(),
            semi_axes: semi_axes.to_vec(),
            angle,
            value,
        }
    }

    pub fn disk(center: [f64; 2], radius: f64, value: f64) -> Self {
        Self::ellipse(center, [radius, radius], 0.0, value)
    }

    pub fn ball(center: [f64; 3], radius: f64, value: f64) -> Self {
        Self::ellipsoid(center, [radius, radius, radius], 0.0, value)
    }

    fn validate(&self, ndim: usize) -> Result<()> {
        if self.center.len() != ndim || self.semi_axes.len() != ndim {
            return Err(Error::InvalidPhantom(format!(
                "component dimension {} does not match grid dimension {ndim}",
                self.center.len()
            )));
        }
        if self.semi_axes.iter().any(|&a| !(a.is_finite() && a > 0.0)) {
            return Err(Error::InvalidPhantom("semi-axes must be positive".into()));
        }
        if self.center.iter().any(|c| !c.is_finite())
            || !self.angle.is_finite()
            || !self.value.is_finite()
        {
            return Err(Error::InvalidPhantom("non-finite component field".into()));
        }
        Ok(())
    }

    /// Membership test for a point, used on cell centers.
    fn contains(&self, p: &[f64]) -> bool {
        let n = self.center.len();
        let mut q = [0.0f64; 3];
        for a in 0..n {
            q[a] = p[a] - self.center[a];
        }
        let (s, c) = self.angle.sin_cos();
        let (qx, qy) = (q[0] * c + q[1] * s, -q[0] * s + q[1] * c);
        q[0] = qx;
        q[1] = qy;
        let mut r = 0.0;
        for a in 0..n {
            let t = q[a] / self.semi_axes[a];
            r += t * t;
        }
        r <= 1.0
    }
}

/// A list of additive components. Overlapping components sum; the empty
/// spec rasterizes to the zero image.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhantomSpec {
    pub components: Vec<PhantomComponent>,
}

impl PhantomSpec {
    pub fn new(components: Vec<PhantomComponent>) -> Self {
        Self { components }
    }

    /// Cell-center point sampling, no antialiasing: a cell receives the sum
    /// of the component values whose shape contains its center.
    pub fn rasterize(&self, grid: &ImageGrid) -> Result<ImageND> {
        for c in &self.components {
            c.validate(grid.ndim())?;
        }
        let mut img = ImageND::zeros(grid.clone());
        let ndim = grid.ndim();
        let mut p = [0.0f64; 3];
        for flat in 0..grid.len() {
            grid.center_of_flat(flat, &mut p);
            let mut v = 0.0;
            for c in &self.components {
                if c.contains(&p[..ndim]) {
                    v += c.value;
                }
            }
            img.values_mut()[flat] = v;
        }
        Ok(img)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_is_zero() {
        let grid = ImageGrid::centered(2, 8, 2.0).unwrap();
        let img = PhantomSpec::default().rasterize(&grid).unwrap();
        assert!(img.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_disk_center_and_corner() {
        let grid = ImageGrid::centered(2, 32, 2.0).unwrap();
        let spec = PhantomSpec::new(vec![PhantomComponent::disk([0.0, 0.0], 1.0, 1.0)]);
        let img = spec.rasterize(&grid).unwrap();
        let center = grid.flat(&[16, 16]);
        let corner = grid.flat(&[0, 0]);
        assert_eq!(img.values()[center], 1.0);
        assert_eq!(img.values()[corner], 0.0);
    }

    #[test]
    fn concentric_disks_add() {
        let grid = ImageGrid::centered(2, 32, 2.0).unwrap();
        let spec = PhantomSpec::new(vec![
            PhantomComponent::disk([0.0, 0.0], 1.0, 1.0),
            PhantomComponent::disk([0.0, 0.0], 0.5, 0.5),
        ]);
        let img = spec.rasterize(&grid).unwrap();
        let center = grid.flat(&[16, 16]);
        assert_eq!(img.values()[center], 1.5);
    }

    #[test]
    fn rejects_nonpositive_axes() {
        let grid = ImageGrid::centered(2, 8, 2.0).unwrap();
        let spec = PhantomSpec::new(vec![PhantomComponent::ellipse(
            [0.0, 0.0],
            [1.0, 0.0],
            0.0,
            1.0,
        )]);
        assert!(spec.rasterize(&grid).is_err());
    }

    #[test]
    fn rotation_moves_mass() {
        let grid = ImageGrid::centered(2, 64, 2.0).unwrap();
        let tilted = PhantomSpec::new(vec![PhantomComponent::ellipse(
            [0.0, 0.0],
            [1.0, 0.25],
            std::f64::consts::FRAC_PI_2,
            1.0,
        )]);
        let img = tilted.rasterize(&grid).unwrap();
        // After a 90 degree rotation the long axis lies along y.
        let on_y = grid.flat(&[32, 32 + 12]);
        let on_x = grid.flat(&[32 + 12, 32]);
        assert_eq!(img.values()[on_y], 1.0);
        assert_eq!(img.values()[on_x], 0.0);
    }

    #[test]
    fn ellipsoid_3d() {
        let grid = ImageGrid::centered(3, 16, 1.0).unwrap();
        let spec = PhantomSpec::new(vec![PhantomComponent::ball([0.0, 0.0, 0.0], 0.5, 2.0)]);
        let img = spec.rasterize(&grid).unwrap();
        let center = grid.flat(&[8, 8, 8]);
        assert_eq!(img.values()[center], 2.0);
        assert_eq!(img.values()[0], 0.0);
    }
}
