//! Partitions of the grid into labeled regions and piecewise-constant
//! functions built on them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ImageGrid, ImageND};

/// Label field assigning each cell one of `m` regions (labels 0..m-1),
/// with the nondegeneracy bound `delta`: every region keeps Lebesgue
/// measure (cell count times cell volume) at least `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    labels: Vec<u32>,
    m: usize,
    delta: f64,
}

impl Partition {
    pub fn new(labels: Vec<u32>, m: usize, delta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("need at least one region".into()));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "nondegeneracy bound must be positive, got {delta}"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= m) {
            return Err(Error::InvalidConfig(format!(
                "label {bad} out of range for m = {m}"
            )));
        }
        Ok(Self { labels, m, delta })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [u32] {
        &mut self.labels
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn region_cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.m];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Check the labels cover the grid and each region meets the
    /// nondegeneracy bound.
    pub fn check_admissible(&self, grid: &ImageGrid) -> Result<()> {
        if self.labels.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} labels for {} cells",
                self.labels.len(),
                grid.len()
            )));
        }
        let v = grid.cell_volume();
        for (k, &count) in self.region_cell_counts().iter().enumerate() {
            let measure = count as f64 * v;
            if measure < self.delta {
                return Err(Error::Degenerate {
                    region: k,
                    measure,
                    delta: self.delta,
                });
            }
        }
        Ok(())
    }

    /// Fraction of cells whose labels differ from `other`.
    pub fn label_distance(&self, other: &Partition) -> f64 {
        let differing = self
            .labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| a != b)
            .count();
        differing as f64 / self.labels.len().max(1) as f64
    }
}

/// A piecewise-constant function: a partition plus one value per region.
#[derive(Debug, Clone, PartialEq)]
pub struct PCFunction {
    pub partition: Partition,
    pub values: Vec<f64>,
}

impl PCFunction {
    pub fn new(partition: Partition, values: Vec<f64>) -> Result<Self> {
        if values.len() != partition.m() {
            return Err(Error::InvalidConfig(format!(
                "{} values for {} regions",
                values.len(),
                partition.m()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("region values".into()));
        }
        Ok(Self { partition, values })
    }

    /// The induced image sum_k f_k chi_k.
    pub fn induced_image(&self, grid: &ImageGrid) -> Result<ImageND> {
        if self.partition.labels().len() != grid.len() {
            return Err(Error::GridMismatch("partition does not fit the grid".into()));
        }
        let values: Vec<f64> = self
            .partition
            .labels()
            .iter()
            .map(|&l| self.values[l as usize])
            .collect();
        ImageND::from_values(grid.clone(), values)
    }
}

/// Knobs of the alternating reconstruction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MSConfig {
    /// Perimeter weight (> 0).
    pub beta: f64,
    /// Region count.
    pub m: usize,
    /// Nondegeneracy lower bound on region measure; defaults to 4 cells'
    /// volume when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_outer_iters")]
    pub max_outer_iters: usize,
    /// Seed for the cell visiting order of label sweeps.
    #[serde(default)]
    pub sweep_seed: u64,
    /// Ridge added to the value-fit Gram matrix; defaults to
    /// 1e-10 trace(G)/m when absent.
    #[serde(default)]
    pub value_solver_ridge: Option<f64>,
}

fn default_outer_iters() -> usize {
    300
}

impl MSConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidConfig(format!("beta must be positive, got {}", self.beta)));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidConfig(format!("delta must be positive, got {d}")));
            }
        }
        if let Some(r) = self.value_solver_ridge {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::InvalidConfig(format!("ridge must be nonnegative, got {r}")));
            }
        }
        Ok(())
    }

    /// Default nondegeneracy bound: 4 cells' volume, small enough not to
    /// bind on honest fixtures while keeping every region nonempty.
    pub fn delta_for(&self, grid: &ImageGrid) -> f64 {
        self.delta.unwrap_or(4.0 * grid.cell_volume())
    }
}

/// Rank-based quantile initialization: cells sorted by image value are
/// split into `m` equally sized groups, so the partition is balanced and
/// admissible for any delta up to (cells/m) cell volumes. This is the
/// standard warm start from a coarse reconstruction.
pub fn quantile_init(img: &ImageND, m: usize, delta: f64) -> Result<Partition> {
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one region".into()));
    }
    let n = img.values().len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        img.values()[a]
            .partial_cmp(&img.values()[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut labels = vec![0u32; n];
    for (rank, &cell) in order.iter().enumerate() {
        labels[cell] = ((rank * m) / n).min(m - 1) as u32;
    }
    Partition::new(labels, m, delta)
}

/// Deterministic sweep order: a seeded permutation of the cell indices.
pub fn sweep_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order
}
