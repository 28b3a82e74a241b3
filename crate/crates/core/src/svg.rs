//! SVG 1.1 renderings of maps, decompositions, and missions.
//!
//! World coordinates are meters with y up; the document uses the same units
//! with y flipped.

use std::fmt::Write;

use crate::decompose::Cell;
use crate::grid::{OccupancyGrid, Point};
use crate::mission::{Element, ElementKind, MissionFile, Role, TurnDirection};
use crate::passes::Pass;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub struct SvgCanvas<'a> {
    grid: &'a OccupancyGrid,
    body: String,
}

impl<'a> SvgCanvas<'a> {
    pub fn new(grid: &'a OccupancyGrid) -> Self {
        Self {
            grid,
            body: String::new(),
        }
    }

    fn height_m(&self) -> f64 {
        self.grid.height() as f64 * self.grid.resolution()
    }

    fn sx(&self, x: f64) -> f64 {
        x
    }

    fn sy(&self, y: f64) -> f64 {
        self.height_m() - y
    }

    /// Free pixels light, obstacles dark, one run of rects per image row.
    pub fn map(&mut self) -> &mut Self {
        let (w, h, res) = (
            self.grid.width(),
            self.grid.height(),
            self.grid.resolution(),
        );
        let _ = writeln!(
            self.body,
            r##"<rect class="obstacle" x="0" y="0" width="{}" height="{}" fill="#444444"/>"##,
            w as f64 * res,
            h as f64 * res
        );
        self.body.push_str(r##"<g class="free" fill="#f4f1e8">"##);
        for row in 0..h {
            let mut col = 0;
            while col < w {
                if !self.grid.is_free(col, row) {
                    col += 1;
                    continue;
                }
                let start = col;
                while col < w && self.grid.is_free(col, row) {
                    col += 1;
                }
                let _ = write!(
                    self.body,
                    r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                    start as f64 * res,
                    row as f64 * res,
                    (col - start) as f64 * res,
                    res
                );
            }
        }
        self.body.push_str("</g>\n");
        self
    }

    pub fn cells(&mut self, cells: &[Cell]) -> &mut Self {
        self.body
            .push_str(r##"<g class="cells" fill="none" stroke="#888888" stroke-width="0.4">"##);
        for cell in cells {
            let res = cell.resolution();
            let mut pts = Vec::new();
            for (i, span) in cell.spans.iter().enumerate() {
                let x0 = (cell.col_start + i) as f64 * res;
                pts.push((x0, span.lo as f64 * res));
                pts.push((x0 + res, span.lo as f64 * res));
            }
            for (i, span) in cell.spans.iter().enumerate().rev() {
                let x0 = (cell.col_start + i) as f64 * res;
                pts.push((x0 + res, span.hi as f64 * res));
                pts.push((x0, span.hi as f64 * res));
            }
            let points: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.3},{:.3}", self.sx(x), self.sy(y)))
                .collect();
            let _ = write!(
                self.body,
                r#"<polygon data-cell="{}" points="{}"/>"#,
                cell.id,
                points.join(" ")
            );
        }
        self.body.push_str("</g>\n");
        self
    }

    pub fn passes(&mut self, passes: &[Pass]) -> &mut Self {
        self.body.push_str(
            r##"<g class="passes" fill="#9ecae1" fill-opacity="0.35" stroke="#3182bd" stroke-width="0.2">"##,
        );
        for p in passes {
            let _ = write!(
                self.body,
                r#"<rect data-pass="{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                p.id,
                self.sx(p.x_low()),
                self.sy(p.y_high),
                p.width,
                p.length()
            );
        }
        self.body.push_str("</g>\n");
        self
    }

    fn element_path(&self, e: &Element) -> String {
        let (s, t) = (e.start_point(), e.end_point());
        match e.kind {
            ElementKind::Line => format!(
                "M {:.4} {:.4} L {:.4} {:.4}",
                self.sx(s.x),
                self.sy(s.y),
                self.sx(t.x),
                self.sy(t.y)
            ),
            ElementKind::Arc => {
                let r = e.radius.unwrap_or(0.0);
                let sweep = e.sweep.unwrap_or(0.0);
                let ccw = e.direction == Some(TurnDirection::Ccw);
                // y is flipped, so world-ccw is the positive-angle flag
                let flag = u8::from(ccw);
                if sweep > std::f64::consts::PI * 1.999 {
                    // near-full circle: go through the antipode
                    let c = Point::new(e.center.unwrap()[0], e.center.unwrap()[1]);
                    let m = Point::new(2.0 * c.x - s.x, 2.0 * c.y - s.y);
                    format!(
                        "M {:.4} {:.4} A {r:.4} {r:.4} 0 0 {flag} {:.4} {:.4} A {r:.4} {r:.4} 0 0 {flag} {:.4} {:.4}",
                        self.sx(s.x),
                        self.sy(s.y),
                        self.sx(m.x),
                        self.sy(m.y),
                        self.sx(t.x),
                        self.sy(t.y)
                    )
                } else {
                    format!(
                        "M {:.4} {:.4} A {r:.4} {r:.4} 0 {} {flag} {:.4} {:.4}",
                        self.sx(s.x),
                        self.sy(s.y),
                        u8::from(sweep > std::f64::consts::PI),
                        self.sx(t.x),
                        self.sy(t.y)
                    )
                }
            }
        }
    }

    /// Draws every mission element once. Covering strips go underneath the
    /// transition geometry; transitions that cross obstacles are flagged.
    pub fn mission(&mut self, mission: &MissionFile) -> &mut Self {
        let s = mission.parameters.footprint;
        self.body
            .push_str(r#"<g class="strips" fill-opacity="0.25">"#);
        for robot in &mission.robots {
            let color = PALETTE[robot.robot_id % PALETTE.len()];
            for e in robot.elements.iter().filter(|e| e.covering) {
                let (a, b) = (e.start_point(), e.end_point());
                let _ = write!(
                    self.body,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}"/>"#,
                    self.sx(a.x - 0.5 * s),
                    self.sy(a.y.max(b.y)),
                    s,
                    (a.y - b.y).abs()
                );
            }
        }
        self.body.push_str("</g>\n");

        self.body.push_str(r#"<g class="elements" fill="none">"#);
        for robot in &mission.robots {
            let color = PALETTE[robot.robot_id % PALETTE.len()];
            for (i, e) in robot.elements.iter().enumerate() {
                let unsafe_arc = e.role == Role::Transition && crosses_obstacle(self.grid, e);
                let (stroke, width, dash) = match e.role {
                    Role::Pass => (color, 0.6, ""),
                    Role::Transition if unsafe_arc => {
                        ("#ff0000", 0.5, r#" stroke-dasharray="1.5 1""#)
                    }
                    Role::Transition => (color, 0.4, ""),
                    Role::DepotLeg => (color, 0.3, r#" stroke-dasharray="2 2""#),
                };
                let role = match e.role {
                    Role::Pass => "pass",
                    Role::Transition => "transition",
                    Role::DepotLeg => "depot-leg",
                };
                let _ = write!(
                    self.body,
                    r#"<path class="element {role}{}" data-robot="{}" data-index="{i}" d="{}" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
                    if unsafe_arc { " crosses-obstacle" } else { "" },
                    robot.robot_id,
                    self.element_path(e)
                );
            }
        }
        self.body.push_str("</g>\n");
        self.depot(mission.depot_point())
    }

    pub fn depot(&mut self, depot: Point) -> &mut Self {
        let _ = writeln!(
            self.body,
            r##"<circle class="depot" cx="{:.3}" cy="{:.3}" r="2" fill="#000000"/>"##,
            self.sx(depot.x),
            self.sy(depot.y)
        );
        self
    }

    pub fn finish(&self) -> String {
        let w = self.grid.width() as f64 * self.grid.resolution();
        let h = self.height_m();
        let d = self.grid.depot();
        // widen the view so an off-map depot stays visible
        let x0 = d.x.min(0.0) - 5.0;
        let y0 = self.sy(d.y).min(0.0) - 5.0;
        let x1 = d.x.max(w) + 5.0;
        let y1 = self.sy(d.y).max(h) + 5.0;
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{x0:.3} {y0:.3} {:.3} {:.3}\">\n{}</svg>\n",
            x1 - x0,
            y1 - y0,
            self.body
        )
    }
}

/// Samples a transition element and reports whether it passes over an
/// occupied pixel of the map. Points off the map are not flagged.
pub fn crosses_obstacle(grid: &OccupancyGrid, e: &Element) -> bool {
    let step = 0.5 * grid.resolution();
    let len = e.length();
    let n = (len / step).ceil().max(1.0) as usize;
    (0..=n).any(|i| {
        let f = i as f64 / n as f64;
        let p = point_along(e, f);
        matches!(grid.pixel_at(p), Some((c, r)) if !grid.is_free(c, r))
    })
}

fn point_along(e: &Element, f: f64) -> Point {
    let (s, t) = (e.start_point(), e.end_point());
    match e.kind {
        ElementKind::Line => Point::new(s.x + f * (t.x - s.x), s.y + f * (t.y - s.y)),
        ElementKind::Arc => {
            let c = e.center.map_or(s, |c| Point::new(c[0], c[1]));
            let r = e.radius.unwrap_or(0.0);
            let sign = if e.direction == Some(TurnDirection::Ccw) {
                1.0
            } else {
                -1.0
            };
            let a0 = (s.y - c.y).atan2(s.x - c.x);
            let a = a0 + sign * f * e.sweep.unwrap_or(0.0);
            Point::new(c.x + r * a.cos(), c.y + r * a.sin())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcs::Solver;
    use crate::mission::{Algorithm, MissionParameters};
    use crate::plan::{PlanConfig, SplitRule};

    #[test]
    fn every_element_drawn_once() {
        let grid = OccupancyGrid::from_fn(20, 20, 1.0, Point::new(-2.0, -2.0), |c, r| {
            !(8..12).contains(&c) || !(8..12).contains(&r)
        })
        .unwrap();
        let config = PlanConfig::new(2.0, 4.5);
        let plan = crate::dcrc::dcrc(2, &grid, &config).unwrap();
        let params = MissionParameters {
            robots: 2,
            radius: 2.0,
            footprint: 4.5,
            seed: 0,
            algorithm: Algorithm::Dcrc,
            solver: Solver::Heuristic,
            line4_depot: false,
            split_rule: SplitRule::Cumulative,
        };
        let mission = MissionFile::new(params, grid.depot(), &plan.tours);
        let doc = SvgCanvas::new(&grid)
            .map()
            .cells(&plan.decomposition.cells)
            .mission(&mission)
            .finish();
        let total: usize = mission.robots.iter().map(|r| r.elements.len()).sum();
        assert_eq!(doc.matches(r#"class="element "#).count(), total);
        // strips precede transition geometry
        let strips = doc.find(r#"class="strips""#).unwrap();
        let elements = doc.find(r#"class="elements""#).unwrap();
        assert!(strips < elements);
        assert!(doc.starts_with("<?xml"));
        assert!(doc.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flags_lines_through_obstacles() {
        let grid = OccupancyGrid::from_fn(10, 1, 1.0, Point::new(0.0, 0.0), |c, _| c != 5).unwrap();
        let e = Element::line(
            Role::Transition,
            Point::new(0.5, 0.5),
            Point::new(9.5, 0.5),
            false,
        );
        assert!(crosses_obstacle(&grid, &e));
        let e = Element::line(
            Role::Transition,
            Point::new(0.5, 0.5),
            Point::new(4.5, 0.5),
            false,
        );
        assert!(!crosses_obstacle(&grid, &e));
    }
}
