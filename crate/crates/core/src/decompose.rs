//! Boustrophedon cellular decomposition over a pixel-column sweep.
//!
//! The sweep advances along +x one pixel column at a time. Each column's free
//! space is a list of vertical spans; a cell continues into the next column
//! only when its span overlaps exactly one span there and that span overlaps
//! nothing else. Every other configuration (split, merge, birth) closes the
//! involved cells and opens new ones.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::grid::OccupancyGrid;

/// Half-open range of pixel rows `[lo, hi)` counted upward from the bottom edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn overlaps(&self, other: &Span) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

/// An obstacle-free region whose every column holds a single free interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: usize,
    /// First pixel column of the cell.
    pub col_start: usize,
    /// One span per column, starting at `col_start`.
    pub spans: Vec<Span>,
    pub neighbors: BTreeSet<usize>,
    resolution: f64,
}

impl Cell {
    pub fn col_end(&self) -> usize {
        self.col_start + self.spans.len()
    }

    pub fn x_min(&self) -> f64 {
        self.col_start as f64 * self.resolution
    }

    pub fn x_max(&self) -> f64 {
        self.col_end() as f64 * self.resolution
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn span(&self, col: usize) -> Option<Span> {
        col.checked_sub(self.col_start)
            .and_then(|i| self.spans.get(i))
            .copied()
    }

    /// Lower boundary in meters at a pixel column.
    pub fn floor(&self, col: usize) -> Option<f64> {
        self.span(col).map(|s| s.lo as f64 * self.resolution)
    }

    /// Upper boundary in meters at a pixel column.
    pub fn ceiling(&self, col: usize) -> Option<f64> {
        self.span(col).map(|s| s.hi as f64 * self.resolution)
    }

    pub fn contains_pixel(&self, col: usize, up: usize) -> bool {
        self.span(col).is_some_and(|s| s.lo <= up && up < s.hi)
    }

    pub fn pixel_count(&self) -> usize {
        self.spans.iter().map(Span::len).sum()
    }
}

/// Maximal free runs in one pixel column, bottom to top.
pub fn column_spans(grid: &OccupancyGrid, col: usize) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut start = None;
    for up in 0..grid.height() {
        match (grid.is_free_up(col, up), start) {
            (true, None) => start = Some(up),
            (false, Some(lo)) => {
                spans.push(Span { lo, hi: up });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = start {
        spans.push(Span {
            lo,
            hi: grid.height(),
        });
    }
    spans
}

/// Decomposes the free space of `grid` into boustrophedon cells.
pub fn bcd(grid: &OccupancyGrid) -> Vec<Cell> {
    let res = grid.resolution();
    let mut cells: Vec<Cell> = Vec::new();
    // (span, cell id) for the previous column
    let mut active: Vec<(Span, usize)> = Vec::new();

    for col in 0..grid.width() {
        let spans = column_spans(grid, col);
        let prev_hits: Vec<Vec<usize>> = spans
            .iter()
            .map(|s| {
                active
                    .iter()
                    .enumerate()
                    .filter(|(_, (p, _))| p.overlaps(s))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let mut fan_out = vec![0usize; active.len()];
        for hits in &prev_hits {
            for &p in hits {
                fan_out[p] += 1;
            }
        }

        let mut next = Vec::with_capacity(spans.len());
        for (span, hits) in spans.iter().zip(&prev_hits) {
            if let [p] = hits.as_slice() {
                if fan_out[*p] == 1 {
                    let id = active[*p].1;
                    cells[id].spans.push(*span);
                    next.push((*span, id));
                    continue;
                }
            }
            let id = cells.len();
            let mut neighbors = BTreeSet::new();
            for &p in hits {
                let other = active[p].1;
                neighbors.insert(other);
                cells[other].neighbors.insert(id);
            }
            cells.push(Cell {
                id,
                col_start: col,
                spans: vec![*span],
                neighbors,
                resolution: res,
            });
            next.push((*span, id));
        }
        active = next;
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Point;

    fn grid_from(rows: &[&str]) -> OccupancyGrid {
        let h = rows.len();
        let w = rows[0].len();
        OccupancyGrid::from_fn(w, h, 1.0, Point::new(0.0, 0.0), |c, r| {
            rows[r].as_bytes()[c] == b'.'
        })
        .unwrap()
    }

    #[test]
    fn open_rectangle_is_one_cell() {
        let g = OccupancyGrid::from_fn(8, 5, 0.5, Point::new(0.0, 0.0), |_, _| true).unwrap();
        let cells = bcd(&g);
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].x_min(), 0.0);
        assert_eq!(cells[0].x_max(), 4.0);
        assert_eq!(cells[0].floor(3), Some(0.0));
        assert_eq!(cells[0].ceiling(3), Some(2.5));
        assert!(cells[0].neighbors.is_empty());
    }

    #[test]
    fn centered_obstacle_gives_four_cells() {
        let g = grid_from(&[
            "..........",
            "..........",
            "...####...",
            "...####...",
            "..........",
            "..........",
        ]);
        let cells = bcd(&g);
        assert_eq!(cells.len(), 4);
        // left, below, above, right in sweep order
        assert_eq!((cells[0].col_start, cells[0].col_end()), (0, 3));
        assert_eq!(cells[1].spans[0], Span { lo: 0, hi: 2 });
        assert_eq!(cells[2].spans[0], Span { lo: 4, hi: 6 });
        assert_eq!((cells[3].col_start, cells[3].col_end()), (7, 10));
        assert_eq!(cells[0].neighbors, BTreeSet::from([1, 2]));
        assert_eq!(cells[3].neighbors, BTreeSet::from([1, 2]));
        assert_eq!(cells[1].neighbors, BTreeSet::from([0, 3]));
    }

    #[test]
    fn all_occupied_is_empty() {
        let g = OccupancyGrid::from_fn(4, 4, 1.0, Point::new(0.0, 0.0), |_, _| false).unwrap();
        assert!(bcd(&g).is_empty());
    }

    #[test]
    fn diagonal_touch_does_not_connect() {
        let g = grid_from(&["#.", ".#"]);
        let cells = bcd(&g);
        assert_eq!(cells.len(), 2);
        assert!(cells[0].neighbors.is_empty());
        assert!(cells[1].neighbors.is_empty());
    }

    #[test]
    fn partition_is_pixel_exact() {
        let g = grid_from(&[
            "..#.....#.",
            "..#..#....",
            "....###...",
            ".#...#..#.",
            ".#........",
        ]);
        let cells = bcd(&g);
        for col in 0..g.width() {
            for up in 0..g.height() {
                let owners = cells.iter().filter(|c| c.contains_pixel(col, up)).count();
                let expected = usize::from(g.is_free_up(col, up));
                assert_eq!(owners, expected, "pixel ({col}, {up})");
            }
        }
        for (i, c) in cells.iter().enumerate() {
            assert_eq!(c.id, i);
            for &n in &c.neighbors {
                assert!(cells[n].neighbors.contains(&i));
            }
        }
    }
}
