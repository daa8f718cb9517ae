//! Spectral inversion: fractional Laplacian filtering, filtered
//! back-projection and regularization families with ill-posedness
//! diagnostics.

pub mod fbp;
pub mod regularize;
pub mod spectral;
pub mod sweep;

pub use fbp::{
    fbp_reconstruct, fbp_reconstruct_prefiltered, fbp_reconstruct_with_margin, DEFAULT_FBP_MARGIN,
};
pub use regularize::{
    analyze_spectrum, apply_regularizer, band_fraction_for_gamma, FilterFamily, GammaNorms,
    RegMethod, RegularizerContext, SpectrumReport,
};
pub use spectral::{fractional_laplacian, filter_profile, SpectralFilterConfig, SpectralWindow};
pub use sweep::{convergence_sweep, SweepReport, SweepRow};
