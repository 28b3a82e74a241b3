//! Plan quality measures: max cost against the ideal split, robot
//! utilization, and pass coverage of the free space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::OccupancyGrid;
use crate::tour::{max_cost, Tour};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("robot count must be at least 1, got {0}")]
    InvalidRobotCount(usize),
}

/// Single-robot cost divided evenly among `k` robots.
pub fn ideal_cost(single_cost: f64, k: usize) -> Result<f64, MetricsError> {
    if k < 1 {
        return Err(MetricsError::InvalidRobotCount(k));
    }
    Ok(single_cost / k as f64)
}

/// Fraction of the `k` robots that received work.
pub fn utilization(tours: &[Tour], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    tours.iter().filter(|t| !t.is_empty()).count() as f64 / k as f64
}

/// Vertical centreline of a traversed pass: `(x, y_low, y_high)`.
pub type Centerline = (f64, f64, f64);

pub fn tour_centerlines(tours: &[Tour]) -> Vec<Centerline> {
    tours
        .iter()
        .flat_map(|t| t.route.nodes.iter())
        .map(|n| (n.entry.x, n.entry.y.min(n.exit.y), n.entry.y.max(n.exit.y)))
        .collect()
}

/// Marks the free pixels whose centre lies within `footprint / 2` of a
/// centreline. Returned mask is row-major like the grid.
pub fn coverage_mask(lines: &[Centerline], grid: &OccupancyGrid, footprint: f64) -> Vec<bool> {
    let (w, h, res) = (grid.width(), grid.height(), grid.resolution());
    let half = 0.5 * footprint + 1e-9;
    let mut covered = vec![false; w * h];
    for &(x, lo, hi) in lines {
        let c0 = ((x - half) / res - 0.5).ceil().max(0.0) as usize;
        let c1 = ((x + half) / res - 0.5).floor();
        if c1 < 0.0 {
            continue;
        }
        let c1 = (c1 as usize).min(w.saturating_sub(1));
        let u0 = ((lo - half) / res - 0.5).ceil().max(0.0) as usize;
        let u1 = ((hi + half) / res - 0.5).floor();
        if u1 < 0.0 {
            continue;
        }
        let u1 = (u1 as usize).min(h.saturating_sub(1));
        for col in c0..=c1 {
            let px = (col as f64 + 0.5) * res;
            for up in u0..=u1 {
                let py = (up as f64 + 0.5) * res;
                let dy = if py < lo {
                    lo - py
                } else if py > hi {
                    py - hi
                } else {
                    0.0
                };
                if (px - x).hypot(dy) <= half {
                    let row = h - 1 - up;
                    covered[row * w + col] = true;
                }
            }
        }
    }
    covered
}

/// Fraction of free pixels covered by traversed passes. Transitions earn no
/// credit. A map without free space is vacuously fully covered.
pub fn coverage_fraction(tours: &[Tour], grid: &OccupancyGrid, footprint: f64) -> f64 {
    let free = grid.free_count();
    if free == 0 {
        return 1.0;
    }
    let mask = coverage_mask(&tour_centerlines(tours), grid, footprint);
    let hit = mask
        .iter()
        .zip(grid.cells())
        .filter(|(&m, &f)| m && f)
        .count();
    hit as f64 / free as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub tour_costs: Vec<f64>,
    pub max_cost: f64,
    pub ideal_cost: f64,
    /// `max_cost / ideal_cost`, at least 1 for a fully utilised plan.
    pub max_over_ideal: f64,
    pub utilization: f64,
    pub coverage_fraction: f64,
    pub single_route_cost: f64,
}

impl PlanReport {
    pub fn new(
        tours: &[Tour],
        k: usize,
        single_route_cost: f64,
        grid: &OccupancyGrid,
        footprint: f64,
    ) -> Result<Self, MetricsError> {
        let ideal = ideal_cost(single_route_cost, k)?;
        let max = max_cost(tours);
        Ok(Self {
            tour_costs: tours.iter().map(|t| t.cost).collect(),
            max_cost: max,
            ideal_cost: ideal,
            max_over_ideal: if ideal > 0.0 { max / ideal } else { 0.0 },
            utilization: utilization(tours, k),
            coverage_fraction: coverage_fraction(tours, grid, footprint),
            single_route_cost,
        })
    }
}
