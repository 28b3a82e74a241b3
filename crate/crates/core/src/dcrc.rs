//! Route clustering: plan one coverage route, then cut it into `k`
//! contiguous subtours with cost thresholds
//! `(c(R) - 2 c_max) * i / k + c_max` for `i = 1..=k`.

use std::ops::Range;

use crate::dcs::{build_dubins_graph, route_cost, solve_route, Route};
use crate::grid::{OccupancyGrid, Point};
use crate::plan::{
    check_inputs, Decomposition, PlanConfig, PlanError, RoundTripAnchor, SplitOptions, SplitRule,
};
use crate::tour::Tour;

/// Cost view of a route: per-vertex midpoints and pass lengths, and the
/// transition cost between consecutive vertices.
#[derive(Debug, Clone, Copy)]
pub struct RouteCosts<'a> {
    pub midpoints: &'a [Point],
    pub pass_lengths: &'a [f64],
    pub transitions: &'a [f64],
}

impl RouteCosts<'_> {
    fn len(&self) -> usize {
        self.midpoints.len()
    }

    /// Closed cost of the contiguous run `range` flown from and back to `depot`.
    pub fn tour_cost(&self, range: Range<usize>, depot: Point) -> f64 {
        if range.is_empty() {
            return 0.0;
        }
        let interior: f64 = self.pass_lengths[range.clone()].iter().sum::<f64>()
            + self.transitions[range.start..range.end - 1]
                .iter()
                .sum::<f64>();
        depot.distance(&self.midpoints[range.start])
            + interior
            + self.midpoints[range.end - 1].distance(&depot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    /// c(R): closed cost of the whole route.
    pub route_cost: f64,
    pub c_max: f64,
    /// Threshold of tour `i` at index `i - 1`.
    pub thresholds: Vec<f64>,
    /// Route vertex range of each tour.
    pub ranges: Vec<Range<usize>>,
}

/// Largest two-vertex round trip along the route, measured from the anchor.
pub fn c_max(costs: &RouteCosts, depot: Point, anchor: RoundTripAnchor) -> f64 {
    let n = costs.len();
    if n == 0 {
        return 0.0;
    }
    let origin = match anchor {
        RoundTripAnchor::FirstVertex => costs.midpoints[0],
        RoundTripAnchor::Depot => depot,
    };
    let reach = |i: usize| origin.distance(&costs.midpoints[i]);
    if n == 1 {
        return 2.0 * reach(0) + costs.pass_lengths[0];
    }
    (0..n - 1)
        .map(|i| {
            reach(i)
                + costs.pass_lengths[i]
                + costs.transitions[i]
                + costs.pass_lengths[i + 1]
                + reach(i + 1)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Computes the `k` contiguous vertex ranges; leftovers join the last tour.
pub fn split_costs(costs: &RouteCosts, depot: Point, k: usize, opts: SplitOptions) -> Split {
    assert!(k >= 1, "k must be positive");
    let n = costs.len();
    let total = costs.tour_cost(0..n, depot);
    let c_max = c_max(costs, depot, opts.anchor);
    let thresholds: Vec<f64> = (1..=k)
        .map(|i| (total - 2.0 * c_max) * i as f64 / k as f64 + c_max)
        .collect();

    // running cost from the depot through the end of vertex j
    let mut reached = Vec::with_capacity(n);
    for j in 0..n {
        let prev = if j == 0 {
            depot.distance(&costs.midpoints[0])
        } else {
            reached[j - 1] + costs.transitions[j - 1]
        };
        reached.push(prev + costs.pass_lengths[j]);
    }

    let mut ranges = Vec::with_capacity(k);
    let mut next = 0;
    for &limit in &thresholds {
        let start = next;
        while next < n {
            // an empty tour costs nothing
            let within = if next == start {
                0.0 <= limit
            } else {
                match opts.rule {
                    SplitRule::Cumulative => reached[next] <= limit,
                    SplitRule::PerTour => costs.tour_cost(start..next, depot) <= limit,
                }
            };
            if !within {
                break;
            }
            next += 1;
        }
        ranges.push(start..next);
    }
    if let Some(last) = ranges.last_mut() {
        last.end = n;
    }
    Split {
        route_cost: total,
        c_max,
        thresholds,
        ranges,
    }
}

fn costs_of(route: &Route) -> (Vec<Point>, Vec<f64>, Vec<f64>) {
    (
        route.nodes.iter().map(|n| n.midpoint()).collect(),
        route.nodes.iter().map(|n| n.length()).collect(),
        route.transitions.iter().map(|t| t.total_length()).collect(),
    )
}

/// Splits a route into `k` tours, robot `i` taking the `i`-th range.
pub fn split_route(
    route: &Route,
    k: usize,
    depot: Point,
    opts: SplitOptions,
) -> Result<(Split, Vec<Tour>), PlanError> {
    if k < 1 {
        return Err(PlanError::InvalidRobotCount(k));
    }
    if route.is_empty() {
        return Err(crate::dcs::DcsError::EmptyRoute.into());
    }
    let (midpoints, pass_lengths, transitions) = costs_of(route);
    let costs = RouteCosts {
        midpoints: &midpoints,
        pass_lengths: &pass_lengths,
        transitions: &transitions,
    };
    let split = split_costs(&costs, depot, k, opts);
    let tours = split
        .ranges
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.is_empty() {
                return Tour::idle(i);
            }
            let sub = Route::from_parts(
                route.nodes[r.clone()].to_vec(),
                route.transitions[r.start..r.end - 1].to_vec(),
            );
            Tour::new(i, sub, depot)
        })
        .collect();
    Ok((split, tours))
}

#[derive(Debug, Clone)]
pub struct DcrcPlan {
    pub decomposition: Decomposition,
    /// Single-robot route that was split.
    pub route: Route,
    /// Closed cost of `route` from the depot.
    pub route_cost: f64,
    pub split: Split,
    pub tours: Vec<Tour>,
}

/// Plans `k` tours by splitting one single-robot coverage route.
pub fn dcrc(k: usize, grid: &OccupancyGrid, config: &PlanConfig) -> Result<DcrcPlan, PlanError> {
    check_inputs(k, grid)?;
    let decomposition = Decomposition::new(grid, config.footprint)?;
    let graph = build_dubins_graph(&decomposition.passes, config.radius)?;
    let route = solve_route(&graph, config.solver, config.seed)?;
    let route_cost = route_cost(&route, grid.depot())?;
    let (split, tours) = split_route(&route, k, grid.depot(), config.split)?;
    Ok(DcrcPlan {
        decomposition,
        route,
        route_cost,
        split,
        tours,
    })
}
