//! Electrostatic verification suite: Newtonian potentials and fields of
//! 3D densities, and the identities linking them to projection data.

pub mod field;
pub mod potential;
pub mod verify;

pub use field::{
    curl, divergence, gradient, interior_relative_error, laplacian_7pt, ScalarField3,
    VectorField3,
};
pub use potential::{
    newton_kernel_cell_average, potential_from_density, potential_via_projection,
    POTENTIAL_NORMALIZATION,
};
pub use verify::{
    fidelity_equivalence, field_from_sinogram, verify_divergence_identity, verify_norm_identity,
    DivergenceReport, FidelityReport, NormIdentityReport,
};
