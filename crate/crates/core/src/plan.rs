//! Shared planning inputs and errors for the multi-robot planners.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dcs::{DcsError, Solver};
use crate::decompose::{bcd, Cell};
use crate::grid::OccupancyGrid;
use crate::passes::{gen_all_passes, pass_graph, Pass, PassError, PassGraph};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("robot count must be at least 1, got {0}")]
    InvalidRobotCount(usize),
    #[error("map has no free space to cover")]
    NoFreeSpace,
    #[error(transparent)]
    Pass(#[from] PassError),
    #[error(transparent)]
    Dcs(#[from] DcsError),
}

/// Reference point used for the per-vertex round trips that bound the split
/// thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundTripAnchor {
    /// Distances measured from the first route vertex.
    #[default]
    FirstVertex,
    /// Distances measured from the depot.
    Depot,
}

/// How a tour's running cost is compared against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Cost along the parent route from the depot up to the candidate vertex.
    #[default]
    Cumulative,
    /// The candidate tour's own closed cost, re-evaluated per inclusion.
    PerTour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SplitOptions {
    pub anchor: RoundTripAnchor,
    pub rule: SplitRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub radius: f64,
    pub footprint: f64,
    pub solver: Solver,
    pub seed: u64,
    #[serde(default)]
    pub split: SplitOptions,
}

impl PlanConfig {
    pub fn new(radius: f64, footprint: f64) -> Self {
        Self {
            radius,
            footprint,
            solver: Solver::Heuristic,
            seed: 0,
            split: SplitOptions::default(),
        }
    }
}

/// Cells, passes, and the pass graph of a map.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub cells: Vec<Cell>,
    pub passes: Vec<Pass>,
    pub graph: PassGraph,
}

impl Decomposition {
    pub fn new(grid: &OccupancyGrid, footprint: f64) -> Result<Self, PlanError> {
        let cells = bcd(grid);
        let passes = gen_all_passes(&cells, footprint)?;
        let graph = pass_graph(&passes, &cells);
        Ok(Self {
            cells,
            passes,
            graph,
        })
    }
}

pub(crate) fn check_inputs(k: usize, grid: &OccupancyGrid) -> Result<(), PlanError> {
    if k < 1 {
        return Err(PlanError::InvalidRobotCount(k));
    }
    if grid.free_count() == 0 {
        return Err(PlanError::NoFreeSpace);
    }
    Ok(())
}
