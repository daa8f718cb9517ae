//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, projection, inversion and
/// reconstruction routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("invalid projection geometry: {0}")]
    InvalidGeometry(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("sinogram is truncated: {0}")]
    Truncated(String),

    #[error("dense operator would need {required} bytes, cap is {cap}")]
    MemoryCap { required: usize, cap: usize },

    #[error("invalid phantom component: {0}")]
    InvalidPhantom(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Gram matrix is numerically singular; rerun with ridge > 0 (near-duplicate regions)")]
    SingularGram,

    #[error("partition violates the nondegeneracy bound: region {region} has measure {measure}, delta = {delta}")]
    Degenerate {
        region: usize,
        measure: f64,
        delta: f64,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
