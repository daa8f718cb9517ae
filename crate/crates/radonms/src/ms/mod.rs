//! Piecewise-constant reconstruction: minimize a fidelity-plus-perimeter
//! energy over labeled partitions and per-region values by alternating
//! least-squares value fits with greedy label sweeps.

pub mod cache;
pub mod energy;
pub mod experiments;
pub mod partition;
pub mod perimeter;
pub mod reconstruct;
pub mod sweep;
pub mod values;

pub use cache::ProjectionCache;
pub use energy::{evaluate_energy, EnergyBreakdown};
pub use experiments::{
    regularization_experiment, stability_experiment, RegularizationReport, RegularizationRow,
    StabilityReport, StabilityRow,
};
pub use partition::{quantile_init, sweep_order, MSConfig, PCFunction, Partition};
pub use perimeter::{discrete_perimeter, perimeter_sum, total_interface_area};
pub use reconstruct::{reconstruct_pc, MsReconstruction, TraceRow};
pub use sweep::{sweep_once, update_partition, SweepOutcome};
pub use values::{default_ridge, fit_values};
