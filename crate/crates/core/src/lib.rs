//! Complete-coverage planning for teams of Dubins vehicles.
//!
//! The pipeline decomposes a binary occupancy map into boustrophedon cells,
//! cuts the cells into sensor-width passes, and plans curvature-bounded tours
//! for `k` robots that all start and end at a shared depot. Two planners are
//! provided:
//!
//! * [`dcrc`] plans one single-robot route over all passes and splits it into
//!   `k` contiguous tours by cost thresholds.
//! * [`dcac`] clusters the pass graph into `k` balanced connected regions and
//!   plans a route per region.
//!
//! ```
//! use dubins_coverage::{fixtures, metrics::PlanReport, plan::PlanConfig};
//!
//! let grid = fixtures::random_map(1, 32, 0.1);
//! let config = PlanConfig::new(3.0, 4.5);
//! let plan = dubins_coverage::dcrc::dcrc(2, &grid, &config).unwrap();
//! let report = PlanReport::new(&plan.tours, 2, plan.route_cost, &grid, 4.5).unwrap();
//! assert!(report.coverage_fraction > 0.99);
//! ```

pub mod dcac;
pub mod dcrc;
pub mod dcs;
pub mod decompose;
pub mod dubins;
pub mod fixtures;
pub mod grid;
pub mod metrics;
pub mod mission;
pub mod passes;
pub mod plan;
pub mod svg;
pub mod tour;

pub use dcs::{Route, Solver};
pub use dubins::{Configuration, DubinsPath};
pub use grid::{OccupancyGrid, Point};
pub use plan::{PlanConfig, PlanError};
pub use tour::Tour;
