//! The reconstruction energy: data fidelity plus weighted perimeter.

use serde::Serialize;

use super::partition::PCFunction;
use super::perimeter::perimeter_sum;
use crate::error::Result;
use crate::grid::ImageGrid;
use crate::metrics::sino_inner;
use crate::radon::{forward_project, Sinogram};

/// Energy terms of a piecewise-constant candidate:
/// `total = fidelity + beta * perimeter` exactly, with
/// `fidelity = ||R f - g||^2` in the shared sinogram norm and `perimeter`
/// the sum of per-region boundary measures.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyBreakdown {
    pub fidelity: f64,
    pub perimeter: f64,
    pub beta: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(fidelity: f64, perimeter: f64, beta: f64) -> Self {
        Self {
            fidelity,
            perimeter,
            beta,
            total: fidelity + beta * perimeter,
        }
    }
}

/// Evaluate the energy of a candidate against measured data.
pub fn evaluate_energy(
    pc: &PCFunction,
    g: &Sinogram,
    beta: f64,
    grid: &ImageGrid,
) -> Result<EnergyBreakdown> {
    let induced = pc.induced_image(grid)?;
    let rf = forward_project(&induced, g.geometry())?;
    let diff = rf.lin_comb(1.0, g, -1.0)?;
    let fidelity = sino_inner(&diff, &diff)?;
    let perimeter = perimeter_sum(&pc.partition, grid);
    Ok(EnergyBreakdown::new(fidelity, perimeter, beta))
}
