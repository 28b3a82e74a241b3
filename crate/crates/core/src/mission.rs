//! Per-robot waypoint programs as serialisable mission files.
//!
//! Each robot's program is a continuous chain of line and arc elements:
//! depot leg out, passes joined by Dubins transitions, depot leg home.
//! Planner costs use Euclidean depot legs to pass midpoints, so
//! [`MissionFile::recompute_costs`] evaluates that formula from the element
//! geometry rather than summing the legs as flown.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dcs::Solver;
use crate::dubins::{normalize_angle, Segment};
use crate::grid::Point;
use crate::plan::SplitRule;
use crate::tour::Tour;

pub const SCHEMA_VERSION: u32 = 1;

const CONTINUITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("robot {robot}: element {index} starts {gap:.3e} m from the previous end")]
    Discontinuous {
        robot: usize,
        index: usize,
        gap: f64,
    },
    #[error("robot {robot}: transition arc {index} has radius {radius}, expected {expected}")]
    ArcRadius {
        robot: usize,
        index: usize,
        radius: f64,
        expected: f64,
    },
    #[error("robot {robot}: element {index} is missing arc geometry")]
    MissingArcData { robot: usize, index: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dcrc,
    Dcac,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Dcrc => "dcrc",
            Algorithm::Dcac => "dcac",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionParameters {
    pub robots: usize,
    pub radius: f64,
    pub footprint: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub solver: Solver,
    pub line4_depot: bool,
    pub split_rule: SplitRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Line,
    Arc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    DepotLeg,
    Pass,
    Transition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurnDirection {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub role: Role,
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Heading at `start`, radians in `[0, 2π)`.
    pub heading: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<TurnDirection>,
    /// Unsigned turn angle in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub covering: bool,
}

fn xy(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

fn pt(a: [f64; 2]) -> Point {
    Point::new(a[0], a[1])
}

impl Element {
    pub fn line(role: Role, start: Point, end: Point, covering: bool) -> Self {
        Self {
            kind: ElementKind::Line,
            role,
            start: xy(start),
            end: xy(end),
            heading: normalize_angle((end.y - start.y).atan2(end.x - start.x)),
            center: None,
            direction: None,
            sweep: None,
            radius: None,
            covering,
        }
    }

    fn from_segment(seg: &Segment) -> Self {
        match *seg {
            Segment::Line {
                start,
                end,
                heading,
            } => Self {
                heading,
                ..Self::line(Role::Transition, start, end, false)
            },
            Segment::Arc {
                center,
                radius,
                start,
                end,
                start_heading,
                sweep,
            } => Self {
                kind: ElementKind::Arc,
                role: Role::Transition,
                start: xy(start),
                end: xy(end),
                heading: start_heading,
                center: Some(xy(center)),
                direction: Some(if sweep >= 0.0 {
                    TurnDirection::Ccw
                } else {
                    TurnDirection::Cw
                }),
                sweep: Some(sweep.abs()),
                radius: Some(radius),
                covering: false,
            },
        }
    }

    pub fn start_point(&self) -> Point {
        pt(self.start)
    }

    pub fn end_point(&self) -> Point {
        pt(self.end)
    }

    pub fn length(&self) -> f64 {
        match self.kind {
            ElementKind::Line => self.start_point().distance(&self.end_point()),
            ElementKind::Arc => self.radius.unwrap_or(0.0) * self.sweep.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotProgram {
    pub robot_id: usize,
    pub cost: f64,
    pub passes: Vec<usize>,
    pub elements: Vec<Element>,
}

impl RobotProgram {
    pub fn from_tour(tour: &Tour, depot: Point) -> Self {
        let route = &tour.route;
        let mut elements = Vec::new();
        let push_leg = |elements: &mut Vec<Element>, a: Point, b: Point| {
            if a.distance(&b) > 1e-12 {
                elements.push(Element::line(Role::DepotLeg, a, b, false));
            }
        };
        if let Some(first) = route.nodes.first() {
            push_leg(&mut elements, depot, first.entry.position());
            for (i, node) in route.nodes.iter().enumerate() {
                let mut pass = Element::line(
                    Role::Pass,
                    node.entry.position(),
                    node.exit.position(),
                    true,
                );
                pass.heading = node.direction.heading();
                elements.push(pass);
                if let Some(t) = route.transitions.get(i) {
                    elements.extend(t.segments().iter().map(Element::from_segment));
                }
            }
            let last = route.nodes.last().expect("non-empty");
            push_leg(&mut elements, last.exit.position(), depot);
        }
        Self {
            robot_id: tour.robot_id,
            cost: tour.cost,
            passes: route.pass_ids(),
            elements,
        }
    }

    /// Planner cost from the elements: Euclidean depot legs to the first and
    /// last pass midpoints plus every pass and transition length.
    pub fn recompute_cost(&self, depot: Point) -> f64 {
        let mids: Vec<Point> = self
            .elements
            .iter()
            .filter(|e| e.role == Role::Pass)
            .map(|e| {
                let (a, b) = (e.start_point(), e.end_point());
                Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
            })
            .collect();
        let (Some(first), Some(last)) = (mids.first(), mids.last()) else {
            return 0.0;
        };
        let interior: f64 = self
            .elements
            .iter()
            .filter(|e| e.role != Role::DepotLeg)
            .map(Element::length)
            .sum();
        depot.distance(first) + interior + last.distance(&depot)
    }

    /// Length actually flown, depot legs included.
    pub fn flown_length(&self) -> f64 {
        self.elements.iter().map(Element::length).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionFile {
    pub schema_version: u32,
    pub parameters: MissionParameters,
    pub depot: [f64; 2],
    pub robots: Vec<RobotProgram>,
}

impl MissionFile {
    pub fn new(parameters: MissionParameters, depot: Point, tours: &[Tour]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            parameters,
            depot: xy(depot),
            robots: tours
                .iter()
                .map(|t| RobotProgram::from_tour(t, depot))
                .collect(),
        }
    }

    pub fn depot_point(&self) -> Point {
        pt(self.depot)
    }

    pub fn recompute_costs(&self) -> Vec<f64> {
        let depot = self.depot_point();
        self.robots
            .iter()
            .map(|r| r.recompute_cost(depot))
            .collect()
    }

    /// Checks element continuity and transition arc radii.
    pub fn validate(&self) -> Result<(), MissionError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(MissionError::SchemaVersion(self.schema_version));
        }
        for robot in &self.robots {
            for (index, e) in robot.elements.iter().enumerate() {
                if e.kind == ElementKind::Arc {
                    let (Some(radius), Some(_), Some(_), Some(_)) =
                        (e.radius, e.center, e.sweep, e.direction)
                    else {
                        return Err(MissionError::MissingArcData {
                            robot: robot.robot_id,
                            index,
                        });
                    };
                    let expected = self.parameters.radius;
                    if e.role == Role::Transition && (radius - expected).abs() > CONTINUITY_TOL {
                        return Err(MissionError::ArcRadius {
                            robot: robot.robot_id,
                            index,
                            radius,
                            expected,
                        });
                    }
                }
                if index > 0 {
                    let gap = robot.elements[index - 1]
                        .end_point()
                        .distance(&e.start_point());
                    if gap > CONTINUITY_TOL {
                        return Err(MissionError::Discontinuous {
                            robot: robot.robot_id,
                            index,
                            gap,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, MissionError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, MissionError> {
        let mission: Self = serde_json::from_str(text)?;
        if mission.schema_version != SCHEMA_VERSION {
            return Err(MissionError::SchemaVersion(mission.schema_version));
        }
        Ok(mission)
    }
}
