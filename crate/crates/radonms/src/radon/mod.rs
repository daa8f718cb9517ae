//! Discrete Radon transform machinery: hyperplane geometry, the forward
//! projector, the direction-averaged back projection, a dense matrix
//! oracle and range diagnostics.

pub mod back;
pub mod dense;
pub mod forward;
pub mod geometry;
pub mod moments;
pub mod sinogram;

pub use back::{back_project, BackProjection};
pub use dense::{build_dense_operator, DenseOperator, DEFAULT_DENSE_CAP};
pub use forward::forward_project;
pub use geometry::{fibonacci_hemisphere, DirectionSet, ProjectionGeometry};
pub use moments::{check_range_moments, MomentFit, MomentReport};
pub use sinogram::Sinogram;
