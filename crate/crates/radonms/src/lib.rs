//! Desk-scale tomography toolkit.
//!
//! The crate provides, on regular 2D/3D grids:
//!
//! * synthetic phantoms, calibrated noise and shared error metrics;
//! * the discrete Radon transform, its direction-averaged dual, a dense
//!   matrix oracle and range diagnostics;
//! * spectral fractional-Laplacian filtering, filtered back-projection and
//!   classical regularization families with ill-posedness diagnostics;
//! * a 3D electrostatic verification suite relating projection data to
//!   Newtonian potentials and fields;
//! * piecewise-constant Mumford-Shah reconstruction by alternating value
//!   fits and greedy label sweeps.
//!
//! All operations are pure functions of their inputs; internal parallelism
//! never changes results. Everything is sized for desk-scale verification
//! runs rather than production imaging.

pub mod electro;
pub mod error;
pub mod grid;
pub mod inversion;
pub mod io;
pub mod metrics;
pub mod ms;
pub mod noise;
pub mod phantom;
pub mod radon;

pub use error::{Error, Result};
pub use grid::{ImageGrid, ImageND};
pub use metrics::relative_l2_error;
pub use noise::{add_noise, NoiseConfig};
pub use phantom::{PhantomComponent, PhantomSpec};
pub use radon::{
    back_project, build_dense_operator, check_range_moments, forward_project, DenseOperator,
    ProjectionGeometry, Sinogram,
};
