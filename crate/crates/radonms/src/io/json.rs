//! JSON schemas for phantoms and projection geometries.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::phantom::PhantomSpec;
use crate::radon::ProjectionGeometry;

/// Serializable geometry description.
///
/// ```json
/// { "n_offsets": 185, "x_max": 1.46, "angles": 180 }
/// { "n_offsets": 67,  "x_max": 1.77, "fibonacci": 256 }
/// { "n_offsets": 67,  "x_max": 1.77,
///   "directions": [{ "dir": [0.0, 0.0, 1.0], "weight": 0.0982 }, ...] }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub n_offsets: usize,
    pub x_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibonacci: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<WeightedDirection>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedDirection {
    pub dir: [f64; 3],
    pub weight: f64,
}

impl GeometrySpec {
    pub fn build(&self) -> Result<ProjectionGeometry> {
        match (&self.angles, &self.fibonacci, &self.directions) {
            (Some(n), None, None) => ProjectionGeometry::new_2d(self.n_offsets, self.x_max, *n),
            (None, Some(n), None) => {
                ProjectionGeometry::fibonacci_3d(self.n_offsets, self.x_max, *n)
            }
            (None, None, Some(list)) => {
                let dirs: Vec<[f64; 3]> = list.iter().map(|w| w.dir).collect();
                let weights: Vec<f64> = list.iter().map(|w| w.weight).collect();
                ProjectionGeometry::new_3d(self.n_offsets, self.x_max, dirs, weights)
            }
            _ => Err(Error::InvalidConfig(
                "geometry needs exactly one of 'angles', 'fibonacci' or 'directions'".into(),
            )),
        }
    }
}

pub fn read_phantom_spec(path: &Path) -> Result<PhantomSpec> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("phantom spec: {e}")))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serialize: {e}")))?;
    super::atomic_write(path, text.as_bytes())
}
