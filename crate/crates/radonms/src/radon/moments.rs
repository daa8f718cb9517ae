//! Range diagnostics: offset moments of a sinogram fitted by homogeneous
//! polynomials in the direction.
//!
//! For data in the range of the forward projector, the k-th offset moment
//! per direction agrees with a homogeneous polynomial of degree k in the
//! direction components up to discretization error; the degree-0 moment is
//! a constant (the total mass seen from every angle). Data far from the
//! range, such as white noise, leaves large fit residuals.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::sinogram::Sinogram;

/// Least-squares fit quality of the degree-k moment.
#[derive(Debug, Clone, Serialize)]
pub struct MomentFit {
    pub degree: usize,
    /// Relative fit residual ||A c - m|| / ||m||; `None` when the fit is
    /// underdetermined (too few directions for the monomial basis).
    pub residual: Option<f64>,
    pub underdetermined: bool,
}

/// Report of [`check_range_moments`].
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub fits: Vec<MomentFit>,
    /// Degree-0 moment (mass) per direction.
    pub mass_per_direction: Vec<f64>,
    /// max |m0 - mean| / |mean|, the mass-constancy defect.
    pub mass_max_rel_dev: f64,
}

/// Compute offset moments m_k(xi) = sum_X g(X, xi) X^k dX for k = 0..k_max
/// and fit each by a homogeneous degree-k polynomial in xi.
pub fn check_range_moments(g: &Sinogram, k_max: usize) -> MomentReport {
    let geom = g.geometry();
    let n_dir = geom.n_directions();
    let n_off = geom.n_offsets();
    let dx = geom.offset_spacing();
    let ndim = geom.ndim();

    let dirs: Vec<Vec<f64>> = (0..n_dir)
        .map(|d| match ndim {
            2 => geom.dir2(d).to_vec(),
            _ => geom.dir3(d).to_vec(),
        })
        .collect();

    let mut fits = Vec::with_capacity(k_max + 1);
    let mut mass = vec![0.0; n_dir];

    for k in 0..=k_max {
        let mut m = DVector::zeros(n_dir);
        for d in 0..n_dir {
            let mut s = 0.0;
            for o in 0..n_off {
                let x = geom.offset(o);
                s += g.value(d, o) * x.powi(k as i32);
            }
            m[d] = s * dx;
        }
        if k == 0 {
            mass.copy_from_slice(m.as_slice());
        }

        let basis = homogeneous_exponents(ndim, k);
        let n_basis = basis.len();
        let m_norm = m.norm();
        if n_dir < n_basis {
            fits.push(MomentFit {
                degree: k,
                residual: None,
                underdetermined: true,
            });
            continue;
        }
        let mut a = DMatrix::zeros(n_dir, n_basis);
        for (d, xi) in dirs.iter().enumerate() {
            for (j, expo) in basis.iter().enumerate() {
                let mut val = 1.0;
                for (axis, &e) in expo.iter().enumerate() {
                    val *= xi[axis].powi(e as i32);
                }
                a[(d, j)] = val;
            }
        }
        let svd = a.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * sigma_max)
            .count();
        if rank < n_basis {
            fits.push(MomentFit {
                degree: k,
                residual: None,
                underdetermined: true,
            });
            continue;
        }
        let residual = if m_norm == 0.0 {
            0.0
        } else {
            let c = svd.solve(&m, 1e-12 * sigma_max).expect("svd solve");
            (&a * c - &m).norm() / m_norm
        };
        fits.push(MomentFit {
            degree: k,
            residual: Some(residual),
            underdetermined: false,
        });
    }

    let mean = mass.iter().sum::<f64>() / n_dir.max(1) as f64;
    let max_dev = mass
        .iter()
        .map(|&v| (v - mean).abs())
        .fold(0.0f64, f64::max);
    let denom = if mean.abs() > 0.0 {
        mean.abs()
    } else {
        mass.iter().map(|v| v.abs()).fold(0.0f64, f64::max)
    };
    let mass_max_rel_dev = if denom == 0.0 { 0.0 } else { max_dev / denom };

    MomentReport {
        fits,
        mass_per_direction: mass,
        mass_max_rel_dev,
    }
}

/// Exponent multi-indices of the degree-k monomials in `ndim` variables.
fn homogeneous_exponents(ndim: usize, k: usize) -> Vec<Vec<usize>> {
    match ndim {
        2 => (0..=k).map(|j| vec![k - j, j]).collect(),
        _ => {
            let mut out = Vec::new();
            for a in 0..=k {
                for b in 0..=(k - a) {
                    out.push(vec![a, b, k - a - b]);
                }
            }
            out
        }
    }
}
