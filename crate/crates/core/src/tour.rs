use crate::dcs::{route_cost, Route};
use crate::grid::Point;

/// One robot's mission: depot, a route over passes, back to the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub robot_id: usize,
    pub route: Route,
    /// Depot legs plus interior cost; zero for an idle robot.
    pub cost: f64,
}

impl Tour {
    pub fn new(robot_id: usize, route: Route, depot: Point) -> Self {
        let cost = route_cost(&route, depot).unwrap_or(0.0);
        Self {
            robot_id,
            route,
            cost,
        }
    }

    pub fn idle(robot_id: usize) -> Self {
        Self {
            robot_id,
            route: Route::from_parts(Vec::new(), Vec::new()),
            cost: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.route.is_empty()
    }

    pub fn pass_ids(&self) -> Vec<usize> {
        self.route.pass_ids()
    }
}

/// Largest tour cost.
pub fn max_cost(tours: &[Tour]) -> f64 {
    tours.iter().map(|t| t.cost).fold(0.0, f64::max)
}
