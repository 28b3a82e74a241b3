//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::f64::consts::PI;

use dubins_coverage::dcs::DubinsGraph;
use dubins_coverage::dubins::{Configuration, DubinsPath, SegmentKind};
use dubins_coverage::passes::Pass;
use dubins_coverage::OccupancyGrid;
use rand::Rng;

/// Integrates the unicycle model `x' = cos θ, y' = sin θ, θ' = κ` with RK4
/// along the path's controls and returns the final state.
pub fn integrate(path: &DubinsPath, steps_per_segment: usize) -> (f64, f64, f64) {
    let mut s = (path.start.x, path.start.y, path.start.theta);
    for (kind, len) in path.word.kinds().into_iter().zip(path.segment_lengths()) {
        let kappa = match kind {
            SegmentKind::Left => 1.0 / path.radius,
            SegmentKind::Right => -1.0 / path.radius,
            SegmentKind::Straight => 0.0,
        };
        let h = len / steps_per_segment as f64;
        let f = |st: (f64, f64, f64)| (st.2.cos(), st.2.sin(), kappa);
        for _ in 0..steps_per_segment {
            let k1 = f(s);
            let k2 = f((
                s.0 + 0.5 * h * k1.0,
                s.1 + 0.5 * h * k1.1,
                s.2 + 0.5 * h * k1.2,
            ));
            let k3 = f((
                s.0 + 0.5 * h * k2.0,
                s.1 + 0.5 * h * k2.1,
                s.2 + 0.5 * h * k2.2,
            ));
            let k4 = f((s.0 + h * k3.0, s.1 + h * k3.1, s.2 + h * k3.2));
            s.0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            s.1 += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            s.2 += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
        }
    }
    s
}

/// Wrapped heading error in radians.
pub fn heading_error(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Largest of position and heading error between the integrated endpoint
/// and the requested goal.
pub fn endpoint_error(path: &DubinsPath) -> f64 {
    let (x, y, th) = integrate(path, 400);
    let q = path.end;
    ((x - q.x).hypot(y - q.y)).max(heading_error(th, q.theta))
}

pub fn random_config(rng: &mut impl Rng, extent: f64) -> Configuration {
    Configuration::new(
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
        rng.gen_range(0.0..2.0 * PI),
    )
}

/// Rotates by `phi` about the origin, then translates by `(dx, dy)`.
pub fn transform(q: Configuration, phi: f64, dx: f64, dy: f64) -> Configuration {
    let (s, c) = phi.sin_cos();
    Configuration::new(
        c * q.x - s * q.y + dx,
        s * q.x + c * q.y + dy,
        q.theta + phi,
    )
}

/// Minimum interior cost over every order and orientation of the passes.
pub fn brute_force_interior(graph: &DubinsGraph) -> f64 {
    let m = graph.group_count();
    let pass_sum: f64 = graph.passes().iter().map(Pass::length).sum();
    let mut order: Vec<usize> = (0..m).collect();
    let mut best = f64::INFINITY;
    permute(&mut order, 0, &mut |perm| {
        for mask in 0..(1usize << m) {
            let seq: Vec<usize> = perm
                .iter()
                .enumerate()
                .map(|(i, &g)| 2 * g + ((mask >> i) & 1))
                .collect();
            let t: f64 = seq
                .windows(2)
                .map(|w| graph.weight(w[0], w[1]).unwrap())
                .sum();
            best = best.min(t + pass_sum);
        }
    });
    best
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// `m` random non-overlapping vertical passes in a 100 m box.
pub fn random_passes(rng: &mut impl Rng, m: usize) -> Vec<Pass> {
    let width = 4.0;
    let mut slots: Vec<usize> = (0..25).collect();
    for i in 0..m {
        let j = rng.gen_range(i..slots.len());
        slots.swap(i, j);
    }
    (0..m)
        .map(|id| {
            let y_low = rng.gen_range(0.0..60.0);
            let y_high = y_low + rng.gen_range(5.0..40.0);
            Pass {
                id,
                cell_id: 0,
                center_x: slots[id] as f64 * width + width / 2.0,
                y_low,
                y_high,
                width,
            }
        })
        .collect()
}

/// 4-connected components of the free pixels.
pub fn flood_fill_components(grid: &OccupancyGrid) -> usize {
    let (w, h) = (grid.width(), grid.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if seen[start] || !grid.cells()[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            let mut push = |j: usize| {
                if !seen[j] && grid.cells()[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                push(i - w);
            }
            if r + 1 < h {
                push(i + w);
            }
            if c > 0 {
                push(i - 1);
            }
            if c + 1 < w {
                push(i + 1);
            }
        }
    }
    count
}

/// Connected components of an undirected graph given by an edge list.
pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while label[r] != r {
            r = label[r];
        }
        let mut y = x;
        while label[y] != r {
            let next = label[y];
            label[y] = r;
            y = next;
        }
        r
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut label, u), find(&mut label, v));
        if a != b {
            label[a.max(b)] = a.min(b);
        }
    }
    (0..n).map(|x| find(&mut label, x)).collect()
}
