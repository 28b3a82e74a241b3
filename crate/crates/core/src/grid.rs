//! Binary occupancy maps with metric scaling and a depot location.
//!
//! Rasters are stored row-major with row 0 at the top of the image, the way
//! graymaps are written. The world frame has its origin at the lower-left
//! corner of the map, x to the right and y up, so pixel `(col, row)` has its
//! center at `((col + 0.5) * res, (height - row - 0.5) * res)`.

use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default graymap value at or above which a pixel counts as free.
pub const DEFAULT_FREE_THRESHOLD: u8 = 128;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} pixels, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("resolution must be positive and finite, got {0}")]
    InvalidResolution(f64),
    #[error("free threshold must lie in [0, 255], got {0}")]
    InvalidThreshold(i64),
    #[error("depot coordinates must be finite")]
    InvalidDepot,
    #[error("invalid pixel data: {0}")]
    InvalidPixel(String),
    #[error("grid dimensions must be at least 1x1 and match the raster length")]
    InvalidDimensions,
    #[error("metadata: {0}")]
    Metadata(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A planar point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Sidecar metadata accompanying a map raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    pub resolution_m: f64,
    pub depot: [f64; 2],
    #[serde(default = "default_threshold")]
    pub free_threshold: i64,
}

fn default_threshold() -> i64 {
    i64::from(DEFAULT_FREE_THRESHOLD)
}

impl MapMeta {
    pub fn new(resolution_m: f64, depot: Point) -> Self {
        Self {
            resolution_m,
            depot: [depot.x, depot.y],
            free_threshold: default_threshold(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Binary occupancy raster. `true` marks free space that must be covered.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<bool>,
    depot: Point,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<bool>,
        depot: Point,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(GridError::InvalidDimensions);
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GridError::InvalidResolution(resolution));
        }
        if !depot.is_finite() {
            return Err(GridError::InvalidDepot);
        }
        Ok(Self {
            width,
            height,
            resolution,
            cells,
            depot,
        })
    }

    /// Builds a grid from a predicate over `(col, row)` with row 0 at the top.
    pub fn from_fn(
        width: usize,
        height: usize,
        resolution: f64,
        depot: Point,
        mut free: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, GridError> {
        let mut cells = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                cells.push(free(col, row));
            }
        }
        Self::new(width, height, resolution, cells, depot)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn depot(&self) -> Point {
        self.depot
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Free test in image coordinates (row 0 at the top).
    pub fn is_free(&self, col: usize, row: usize) -> bool {
        col < self.width && row < self.height && self.cells[row * self.width + col]
    }

    /// Free test with the vertical index counted from the bottom edge.
    pub fn is_free_up(&self, col: usize, up: usize) -> bool {
        up < self.height && self.is_free(col, self.height - 1 - up)
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            (col as f64 + 0.5) * self.resolution,
            (self.height as f64 - row as f64 - 0.5) * self.resolution,
        )
    }

    /// Pixel containing a world point, if it lies on the map.
    pub fn pixel_at(&self, p: Point) -> Option<(usize, usize)> {
        let col = (p.x / self.resolution).floor();
        let up = (p.y / self.resolution).floor();
        if col < 0.0 || up < 0.0 || col >= self.width as f64 || up >= self.height as f64 {
            return None;
        }
        let up = up as usize;
        Some((col as usize, self.height - 1 - up))
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn with_depot(mut self, depot: Point) -> Result<Self, GridError> {
        if !depot.is_finite() {
            return Err(GridError::InvalidDepot);
        }
        self.depot = depot;
        Ok(self)
    }
}

/// Free area in square meters.
pub fn free_area(grid: &OccupancyGrid) -> f64 {
    grid.free_count() as f64 * grid.resolution * grid.resolution
}

/// Reads a P2/P5 graymap or an ASCII `.`/`#` grid and applies the metadata.
pub fn load_grid(mut source: impl Read, meta: &MapMeta) -> Result<OccupancyGrid, GridError> {
    if !(meta.resolution_m.is_finite() && meta.resolution_m > 0.0) {
        return Err(GridError::InvalidResolution(meta.resolution_m));
    }
    if !(0..=255).contains(&meta.free_threshold) {
        return Err(GridError::InvalidThreshold(meta.free_threshold));
    }
    let depot = Point::new(meta.depot[0], meta.depot[1]);
    if !depot.is_finite() {
        return Err(GridError::InvalidDepot);
    }
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;

    let threshold = meta.free_threshold as u32;
    let (width, height, cells) = match bytes.get(..2) {
        Some(b"P2") => {
            let (w, h, values) = parse_graymap(&bytes, false)?;
            (w, h, values.into_iter().map(|v| v >= threshold).collect())
        }
        Some(b"P5") => {
            let (w, h, values) = parse_graymap(&bytes, true)?;
            (w, h, values.into_iter().map(|v| v >= threshold).collect())
        }
        _ => parse_ascii(&bytes)?,
    };
    OccupancyGrid::new(width, height, meta.resolution_m, cells, depot)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<usize, GridError> {
        let token = self
            .next_token()
            .ok_or_else(|| GridError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(token)
            .ok()
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| {
                GridError::MalformedHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(token)
                ))
            })
    }
}

/// Returns pixel values rescaled to 0..=255.
fn parse_graymap(bytes: &[u8], binary: bool) -> Result<(usize, usize, Vec<u32>), GridError> {
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.next_number("width")?;
    let height = cur.next_number("height")?;
    let maxval = cur.next_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(GridError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(GridError::MalformedHeader(format!(
            "maxval {maxval} outside 1..=65535"
        )));
    }
    let expected = width * height;
    let scale = |v: usize| -> u32 { ((v * 255 + maxval / 2) / maxval) as u32 };

    let mut values = Vec::with_capacity(expected);
    if binary {
        // exactly one whitespace byte separates maxval from the payload
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(GridError::TruncatedPayload { expected, found: 0 });
        }
        let payload = &bytes[cur.pos + 1..];
        let bpp = if maxval > 255 { 2 } else { 1 };
        let found = payload.len() / bpp;
        if found < expected {
            return Err(GridError::TruncatedPayload { expected, found });
        }
        for px in payload.chunks_exact(bpp).take(expected) {
            let v = if bpp == 2 {
                usize::from(px[0]) << 8 | usize::from(px[1])
            } else {
                usize::from(px[0])
            };
            if v > maxval {
                return Err(GridError::InvalidPixel(format!(
                    "{v} exceeds maxval {maxval}"
                )));
            }
            values.push(scale(v));
        }
    } else {
        while values.len() < expected {
            let Some(token) = cur.next_token() else {
                return Err(GridError::TruncatedPayload {
                    expected,
                    found: values.len(),
                });
            };
            let v = std::str::from_utf8(token)
                .ok()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| {
                    GridError::InvalidPixel(String::from_utf8_lossy(token).into_owned())
                })?;
            if v > maxval {
                return Err(GridError::InvalidPixel(format!(
                    "{v} exceeds maxval {maxval}"
                )));
            }
            values.push(scale(v));
        }
    }
    Ok((width, height, values))
}

fn parse_ascii(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>), GridError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| GridError::MalformedHeader("not a graymap and not UTF-8 text".into()))?;
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    let Some(first) = rows.first() else {
        return Err(GridError::MalformedHeader("empty ASCII grid".into()));
    };
    let width = first.chars().count();
    let mut cells = Vec::with_capacity(width * rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(GridError::MalformedHeader(format!(
                "row {i} has {} columns, expected {width}",
                row.chars().count()
            )));
        }
        for ch in row.chars() {
            match ch {
                '.' => cells.push(true),
                '#' => cells.push(false),
                other => {
                    return Err(GridError::InvalidPixel(format!(
                        "unexpected character {other:?} in row {i}"
                    )))
                }
            }
        }
    }
    Ok((width, rows.len(), cells))
}
