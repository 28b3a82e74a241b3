//! Coverage passes and the undirected pass-adjacency graph.

use serde::Serialize;
use thiserror::Error;

use crate::decompose::Cell;
use crate::grid::Point;

const EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PassError {
    #[error("sensor footprint must be positive and finite, got {0}")]
    InvalidFootprint(f64),
}

/// Vertical coverage strip of width `width` centred on `center_x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pass {
    pub id: usize,
    pub cell_id: usize,
    pub center_x: f64,
    pub y_low: f64,
    pub y_high: f64,
    pub width: f64,
}

impl Pass {
    pub fn length(&self) -> f64 {
        self.y_high - self.y_low
    }

    pub fn midpoint(&self) -> Point {
        Point::new(self.center_x, 0.5 * (self.y_low + self.y_high))
    }

    pub fn x_low(&self) -> f64 {
        self.center_x - 0.5 * self.width
    }

    pub fn x_high(&self) -> f64 {
        self.center_x + 0.5 * self.width
    }

    /// Strips touch or overlap horizontally and share a vertical interval.
    pub fn shares_edge(&self, other: &Pass) -> bool {
        let x_contact =
            self.x_low() <= other.x_high() + EPS && other.x_low() <= self.x_high() + EPS;
        let y_overlap = self.y_high.min(other.y_high) - self.y_low.max(other.y_low);
        x_contact && y_overlap > EPS
    }
}

/// Pixel columns of `cell` whose centres fall inside the strip at `center_x`.
fn strip_columns(cell: &Cell, center_x: f64, s: f64) -> std::ops::Range<usize> {
    let res = cell.resolution();
    let lo = center_x - 0.5 * s - EPS;
    let hi = center_x + 0.5 * s + EPS;
    let first = ((lo / res) - 0.5).ceil().max(cell.col_start as f64) as usize;
    let last = (((hi / res) - 0.5).floor() as isize).min(cell.col_end() as isize - 1);
    if last >= first as isize {
        first..last as usize + 1
    } else {
        // strip narrower than a pixel and between pixel centres
        let col = ((center_x / res).floor() as usize).clamp(cell.col_start, cell.col_end() - 1);
        col..col + 1
    }
}

/// Splits one cell into passes of width `s`, ordered by `center_x`.
///
/// Pass ids are local (0-based); [`gen_all_passes`] renumbers them globally.
/// The last pass is clamped against the cell's right edge when the width is
/// not a multiple of `s`. A pass spans the hull of the free intervals of the
/// columns under its strip.
pub fn gen_passes(cell: &Cell, s: f64) -> Result<Vec<Pass>, PassError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(PassError::InvalidFootprint(s));
    }
    let (x_min, x_max) = (cell.x_min(), cell.x_max());
    let width = x_max - x_min;
    let count = ((width / s) - EPS).ceil().max(1.0) as usize;
    let res = cell.resolution();

    let passes = (0..count)
        .map(|i| {
            let center_x = if width <= s {
                0.5 * (x_min + x_max)
            } else {
                (x_min + 0.5 * s + i as f64 * s).min(x_max - 0.5 * s)
            };
            let (lo, hi) = strip_columns(cell, center_x, s)
                .filter_map(|c| cell.span(c))
                .fold((usize::MAX, 0), |(lo, hi), sp| {
                    (lo.min(sp.lo), hi.max(sp.hi))
                });
            Pass {
                id: i,
                cell_id: cell.id,
                center_x,
                y_low: lo as f64 * res,
                y_high: hi as f64 * res,
                width: s,
            }
        })
        .collect();
    Ok(passes)
}

/// Passes for every cell with contiguous global ids in cell order.
pub fn gen_all_passes(cells: &[Cell], s: f64) -> Result<Vec<Pass>, PassError> {
    let mut all = Vec::new();
    for cell in cells {
        for mut p in gen_passes(cell, s)? {
            p.id = all.len();
            all.push(p);
        }
    }
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassEdge {
    pub u: usize,
    pub v: usize,
    pub cost: f64,
}

/// Undirected graph over passes; vertex `i` is the pass at index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PassGraph {
    edges: Vec<PassEdge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    midpoints: Vec<Point>,
}

impl PassGraph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> &[PassEdge] {
        &self.edges
    }

    /// Neighbours of `v`, sorted by id.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn midpoint(&self, v: usize) -> Point {
        self.midpoints[v]
    }

    pub fn cost(&self, u: usize, v: usize) -> Option<f64> {
        self.adjacency[u]
            .iter()
            .find(|(w, _)| *w == v)
            .map(|&(_, c)| c)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Connects passes of the same or neighbouring cells whose strips share an
/// edge. Costs are distances between pass midpoints.
///
/// `passes` must be indexed by id, as produced by [`gen_all_passes`].
pub fn pass_graph(passes: &[Pass], cells: &[Cell]) -> PassGraph {
    let n = passes.len();
    let mut by_cell: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for (i, p) in passes.iter().enumerate() {
        debug_assert_eq!(p.id, i);
        by_cell[p.cell_id].push(i);
    }

    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); n];
    let mut link = |u: usize, v: usize| {
        let (a, b) = (&passes[u], &passes[v]);
        if a.shares_edge(b) {
            let cost = a.midpoint().distance(&b.midpoint());
            let (u, v) = (u.min(v), u.max(v));
            edges.push(PassEdge { u, v, cost });
            adjacency[u].push((v, cost));
            adjacency[v].push((u, cost));
        }
    };
    for cell in cells {
        let own = &by_cell[cell.id];
        for (i, &u) in own.iter().enumerate() {
            for &v in &own[i + 1..] {
                link(u, v);
            }
        }
        for &other in cell.neighbors.range(cell.id + 1..) {
            for &u in own {
                for &v in &by_cell[other] {
                    link(u, v);
                }
            }
        }
    }
    edges.sort_by_key(|e| (e.u, e.v));
    for adj in &mut adjacency {
        adj.sort_by_key(|&(w, _)| w);
    }
    PassGraph {
        edges,
        adjacency,
        midpoints: passes.iter().map(Pass::midpoint).collect(),
    }
}
