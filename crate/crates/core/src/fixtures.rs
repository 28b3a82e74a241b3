//! Synthetic maps for tests, benchmarks, and demos.
//!
//! The three named scenes mimic the evaluation areas at desk scale: an open
//! square, an irregular blob with islands, and a larger lake-like outline with
//! bays. All are deterministic.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{OccupancyGrid, Point};

/// Footprint used with the named scenes, in meters.
pub const SCENE_FOOTPRINT: f64 = 4.5;
/// Turning radius used with the named scenes, in meters.
pub const SCENE_RADIUS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scene {
    OpenSquare,
    IslandBlob,
    Lake,
}

impl Scene {
    pub const ALL: [Scene; 3] = [Scene::OpenSquare, Scene::IslandBlob, Scene::Lake];

    pub fn name(self) -> &'static str {
        match self {
            Scene::OpenSquare => "open-square",
            Scene::IslandBlob => "island-blob",
            Scene::Lake => "lake",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn grid(self) -> OccupancyGrid {
        match self {
            Scene::OpenSquare => open_square(),
            Scene::IslandBlob => island_blob(),
            Scene::Lake => lake(),
        }
    }
}

/// 200 m x 200 m obstacle-free square at 2 m per pixel.
pub fn open_square() -> OccupancyGrid {
    OccupancyGrid::from_fn(100, 100, 2.0, Point::new(-10.0, -10.0), |_, _| true)
        .expect("valid fixture")
}

/// Star-shaped outline `radius(θ) = base * (1 + Σ a_i sin(i θ + φ_i))`.
fn outline_radius(theta: f64, base: f64, harmonics: &[(f64, f64, f64)]) -> f64 {
    base * (1.0
        + harmonics
            .iter()
            .map(|&(order, amp, phase)| amp * (order * theta + phase).sin())
            .sum::<f64>())
}

fn inside_ellipse(p: Point, c: Point, rx: f64, ry: f64) -> bool {
    let dx = (p.x - c.x) / rx;
    let dy = (p.y - c.y) / ry;
    dx * dx + dy * dy <= 1.0
}

/// Irregular 200 m blob with three islands, 2 m per pixel.
pub fn island_blob() -> OccupancyGrid {
    let center = Point::new(100.0, 100.0);
    let harmonics = [(2.0, 0.12, 0.3), (3.0, 0.08, 1.9), (5.0, 0.05, 0.7)];
    let islands = [
        (Point::new(70.0, 120.0), 14.0, 10.0),
        (Point::new(130.0, 80.0), 10.0, 18.0),
        (Point::new(110.0, 145.0), 8.0, 8.0),
    ];
    let w = 100;
    let h = 100;
    let res = 2.0;
    OccupancyGrid::from_fn(w, h, res, Point::new(10.0, 10.0), |col, row| {
        let p = Point::new(
            (col as f64 + 0.5) * res,
            (h as f64 - row as f64 - 0.5) * res,
        );
        let theta = (p.y - center.y).atan2(p.x - center.x);
        let inside = p.distance(&center) <= outline_radius(theta, 80.0, &harmonics);
        inside
            && !islands
                .iter()
                .any(|&(c, rx, ry)| inside_ellipse(p, c, rx, ry))
    })
    .expect("valid fixture")
}

/// Elongated 320 m x 240 m lake outline with bays and two islands.
pub fn lake() -> OccupancyGrid {
    let center = Point::new(160.0, 120.0);
    let harmonics = [
        (2.0, 0.10, 0.0),
        (3.0, 0.07, 2.4),
        (4.0, 0.05, 0.9),
        (7.0, 0.03, 1.3),
    ];
    let islands = [
        (Point::new(120.0, 110.0), 12.0, 16.0),
        (Point::new(215.0, 140.0), 18.0, 9.0),
    ];
    let w = 160;
    let h = 120;
    let res = 2.0;
    OccupancyGrid::from_fn(w, h, res, Point::new(0.0, 0.0), |col, row| {
        let p = Point::new(
            (col as f64 + 0.5) * res,
            (h as f64 - row as f64 - 0.5) * res,
        );
        // stretch horizontally so the outline is oval
        let q = Point::new(center.x + (p.x - center.x) * 0.75, p.y);
        let theta = (q.y - center.y).atan2(q.x - center.x);
        let inside = q.distance(&center) <= outline_radius(theta, 100.0, &harmonics);
        inside
            && !islands
                .iter()
                .any(|&(c, rx, ry)| inside_ellipse(p, c, rx, ry))
    })
    .expect("valid fixture")
}

/// Random `size x size` map at 1 m per pixel whose obstacle fraction is at
/// most `density`, built from axis-aligned and elliptical blocks.
pub fn random_map(seed: u64, size: usize, density: f64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut free = vec![true; size * size];
    let target = (density.clamp(0.0, 1.0) * (size * size) as f64) as usize;
    let mut blocked = 0;
    let mut attempts = 0;
    while blocked < target && attempts < 1000 {
        attempts += 1;
        let w = rng.gen_range(2..=size / 5);
        let h = rng.gen_range(2..=size / 5);
        let x0 = rng.gen_range(0..size - w);
        let y0 = rng.gen_range(0..size - h);
        let elliptic = rng.gen_bool(0.4);
        let mut stamp = Vec::new();
        for r in y0..y0 + h {
            for c in x0..x0 + w {
                let inside = !elliptic || {
                    let dx = (c as f64 + 0.5 - x0 as f64 - w as f64 / 2.0) / (w as f64 / 2.0);
                    let dy = (r as f64 + 0.5 - y0 as f64 - h as f64 / 2.0) / (h as f64 / 2.0);
                    dx * dx + dy * dy <= 1.0
                };
                if inside && free[r * size + c] {
                    stamp.push(r * size + c);
                }
            }
        }
        if blocked + stamp.len() > target {
            continue;
        }
        blocked += stamp.len();
        for i in stamp {
            free[i] = false;
        }
    }
    let depot = Point::new(rng.gen_range(0.0..size as f64), -5.0);
    OccupancyGrid::new(size, size, 1.0, free, depot).expect("valid fixture")
}

/// Points on a circle, for sweeping depots around a map.
pub fn ring(center: Point, radius: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|i| {
            let a = TAU * i as f64 / count as f64;
            Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::free_area;

    #[test]
    fn scenes_have_free_space() {
        for scene in Scene::ALL {
            let g = scene.grid();
            assert!(free_area(&g) > 10_000.0, "{}", scene.name());
            assert_eq!(Scene::from_name(scene.name()), Some(scene));
        }
        assert_eq!(free_area(&open_square()), 40_000.0);
    }

    #[test]
    fn random_map_respects_density() {
        for seed in 0..10 {
            let g = random_map(seed, 64, 0.2);
            let occupied = 64 * 64 - g.free_count();
            assert!(occupied as f64 <= 0.2 * 4096.0);
            assert_eq!(g, random_map(seed, 64, 0.2));
        }
        assert_eq!(random_map(3, 64, 0.0).free_count(), 4096);
    }
}
