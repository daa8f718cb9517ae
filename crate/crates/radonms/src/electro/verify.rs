//! Numerical checks of the identities linking projection data to
//! electrostatics in 3D:
//!
//! * norm identity: ||R f||^2 = (1/(2 (2 pi)^2)) ||grad I_sphere(R f)||^2;
//! * source identities: f = div E = -Lap phi for E = -grad phi and
//!   phi the Newtonian potential of f;
//! * fidelity equivalence: ||R f - g||^2 = 2 (2 pi)^2 ||E - E_g||^2.
//!
//! Each check computes both sides with the matched discrete measures of
//! [`crate::metrics`] and reports the relative mismatch; a large mismatch
//! is a finding, not an error.

use serde::Serialize;

use super::field::{divergence, gradient, interior_relative_error, laplacian_7pt, VectorField3};
use super::potential::potential_from_density;
use crate::error::{Error, Result};
use crate::grid::ImageND;
use crate::metrics::{sino_inner, sino_norm};
use crate::radon::{back_project, forward_project, ProjectionGeometry, Sinogram};

/// E = -(1/(2 (2 pi)^2)) grad I_sphere(g), the electric field a sinogram
/// induces through the dual map.
pub fn field_from_sinogram(g: &Sinogram, grid: &crate::grid::ImageGrid) -> Result<VectorField3> {
    if grid.ndim() != 3 {
        return Err(Error::InvalidGrid("fields are 3D".into()));
    }
    let bp = back_project(g, grid)?;
    let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
    let c = g.geometry().full_sphere_measure() / (2.0 * two_pi_sq);
    let grad = gradient(&bp.image)?;
    Ok(grad.scale(-c))
}

/// Result of [`verify_norm_identity`].
#[derive(Debug, Clone, Serialize)]
pub struct NormIdentityReport {
    /// ||R f||^2 over the double covering.
    pub sinogram_side: f64,
    /// (1/(2 (2 pi)^2)) ||grad I_sphere(R f)||^2 over the field grid.
    pub field_side: f64,
    pub rel_mismatch: f64,
}

/// Compare the two sides of the norm identity on a smooth density.
///
/// The field-side integral runs over all of space in the continuum and
/// its integrand decays only like 1/r^4, so the squared field norm inside
/// a box converges like 1/boxsize. The field is therefore evaluated on
/// the density grid padded by `field_margin` (same spacing); the sinogram
/// offsets should cover that padded box so the back projection sees no
/// truncation. Truncating the field integral to the density box is the
/// classic way to lose this identity.
pub fn verify_norm_identity(
    f: &ImageND,
    geom: &ProjectionGeometry,
    field_margin: f64,
) -> Result<NormIdentityReport> {
    let g = forward_project(f, geom)?;
    let lhs = {
        let n = sino_norm(&g);
        n * n
    };
    let field_grid = f.grid().padded(field_margin)?;
    let bp = back_project(&g, &field_grid)?;
    let i_sphere = bp.image.scale(geom.full_sphere_measure());
    let grad = gradient(&i_sphere)?;
    let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
    let rhs = grad.norm_sq() / (2.0 * two_pi_sq);
    Ok(NormIdentityReport {
        sinogram_side: lhs,
        field_side: rhs,
        rel_mismatch: (lhs - rhs).abs() / lhs.max(rhs).max(f64::MIN_POSITIVE),
    })
}

/// Result of [`verify_divergence_identity`].
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    /// Interior relative L2 residual of -Lap phi (7-point) against f.
    pub laplacian_residual: f64,
    /// Interior relative L2 residual of div E against f.
    pub divergence_residual: f64,
    /// Interior relative L2 gap between div E and the matched-stencil
    /// -div grad phi; the two are the same composition of centered
    /// differences, so this vanishes to rounding.
    pub stencil_gap: f64,
}

/// Check f = div E = -Lap phi with phi the FFT-convolution potential of f
/// and E = -grad phi. Residuals are taken over the interior (2 cells off
/// every face) where the centered stencils hold.
pub fn verify_divergence_identity(f: &ImageND) -> Result<DivergenceReport> {
    let phi = potential_from_density(f)?;
    let e = gradient(&phi)?.scale(-1.0);
    let grid = f.grid();
    let margin = 2;

    let lap = laplacian_7pt(&phi)?;
    let neg_lap: Vec<f64> = lap.values().iter().map(|&v| -v).collect();
    let laplacian_residual = interior_relative_error(&neg_lap, f.values(), grid, margin);

    let div_e = divergence(&e)?;
    let divergence_residual = interior_relative_error(div_e.values(), f.values(), grid, margin);

    // Matched composition: -div(grad phi) computed through the same
    // centered stencils that produced div E.
    let wide: Vec<f64> = divergence(&gradient(&phi)?)?
        .values()
        .iter()
        .map(|&v| -v)
        .collect();
    let num_sq: f64 = {
        let mut idx = [0usize; 3];
        let mut num = 0.0;
        let mut den = 0.0;
        for flat in 0..grid.len() {
            grid.unflat(flat, &mut idx);
            let inside =
                (0..3).all(|ax| idx[ax] >= margin && idx[ax] + margin < grid.dims()[ax]);
            if inside {
                let d = div_e.values()[flat] - wide[flat];
                num += d * d;
                den += wide[flat] * wide[flat];
            }
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    };

    Ok(DivergenceReport {
        laplacian_residual,
        divergence_residual,
        stencil_gap: num_sq,
    })
}

/// Result of [`fidelity_equivalence`].
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    /// ||R f - g||^2 over the double covering.
    pub sinogram_side: f64,
    /// 2 (2 pi)^2 ||E - E_g||^2 over the grid.
    pub field_side: f64,
    pub rel_gap: f64,
}

/// Compare the tomographic fidelity of (f, g) with the electric-field
/// misfit. The field difference is computed from the sinogram residual by
/// linearity of the dual map, which is exact for the discrete operators;
/// as in [`verify_norm_identity`], the field norm is taken on the density
/// grid padded by `field_margin`.
pub fn fidelity_equivalence(
    f: &ImageND,
    g: &Sinogram,
    field_margin: f64,
) -> Result<FidelityReport> {
    let rf = forward_project(f, g.geometry())?;
    let diff = rf.lin_comb(1.0, g, -1.0)?;
    let sinogram_side = sino_inner(&diff, &diff)?;
    let field_grid = f.grid().padded(field_margin)?;
    let e_diff = field_from_sinogram(&diff, &field_grid)?;
    let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
    let field_side = 2.0 * two_pi_sq * e_diff.norm_sq();
    Ok(FidelityReport {
        sinogram_side,
        field_side,
        rel_gap: (sinogram_side - field_side).abs()
            / sinogram_side.max(field_side).max(f64::MIN_POSITIVE),
    })
}
