//! Single-robot Dubins coverage solver.
//!
//! Every pass contributes two directed nodes, one per traversal direction, and
//! a route must visit exactly one node of every pass. Arc weights are Dubins
//! lengths from the exit configuration of one node to the entry of another.
//! Route endpoints are free; depot legs are attached afterwards by
//! [`route_cost`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dubins::{dubins_shortest, Configuration, DubinsError, DubinsPath};
use crate::grid::Point;
use crate::passes::Pass;

/// Largest pass count accepted by [`Solver::Exact`].
pub const EXACT_PASS_LIMIT: usize = 12;

const IMPROVE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DcsError {
    #[error("cannot build a Dubins graph without passes")]
    NoPasses,
    #[error("exact solver supports at most {limit} passes, got {passes}")]
    ExactLimit { passes: usize, limit: usize },
    #[error("route is empty")]
    EmptyRoute,
    #[error(transparent)]
    Dubins(#[from] DubinsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Travel along +y.
    Ascending,
    /// Travel along -y.
    Descending,
}

impl Direction {
    pub fn heading(self) -> f64 {
        match self {
            Direction::Ascending => PI / 2.0,
            Direction::Descending => 3.0 * PI / 2.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Ascending => Direction::Descending,
            Direction::Descending => Direction::Ascending,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedPassNode {
    pub pass_id: usize,
    pub direction: Direction,
    pub entry: Configuration,
    pub exit: Configuration,
}

impl DirectedPassNode {
    pub fn new(pass: &Pass, direction: Direction) -> Self {
        let h = direction.heading();
        let (from, to) = match direction {
            Direction::Ascending => (pass.y_low, pass.y_high),
            Direction::Descending => (pass.y_high, pass.y_low),
        };
        Self {
            pass_id: pass.id,
            direction,
            entry: Configuration::new(pass.center_x, from, h),
            exit: Configuration::new(pass.center_x, to, h),
        }
    }

    pub fn length(&self) -> f64 {
        self.entry.position().distance(&self.exit.position())
    }

    pub fn midpoint(&self) -> Point {
        Point::new(
            0.5 * (self.entry.x + self.exit.x),
            0.5 * (self.entry.y + self.exit.y),
        )
    }
}

/// Directed Dubins graph over a set of passes.
///
/// Node `2 * g + d` is pass group `g` traversed in direction `d`
/// (0 ascending, 1 descending).
#[derive(Debug, Clone)]
pub struct DubinsGraph {
    passes: Vec<Pass>,
    nodes: Vec<DirectedPassNode>,
    weights: Vec<f64>,
    radius: f64,
}

impl DubinsGraph {
    pub fn group_count(&self) -> usize {
        self.passes.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn passes(&self) -> &[Pass] {
        &self.passes
    }

    pub fn node(&self, u: usize) -> &DirectedPassNode {
        &self.nodes[u]
    }

    pub fn nodes(&self) -> &[DirectedPassNode] {
        &self.nodes
    }

    /// Arc weight, `None` between the two nodes of one pass.
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        (u / 2 != v / 2).then(|| self.weights[u * self.nodes.len() + v])
    }

    /// Number of directed arcs.
    pub fn arc_count(&self) -> usize {
        let n = self.nodes.len();
        (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u / 2 != v / 2)
            .count()
    }

    /// Transition path for arc `u -> v`.
    pub fn transition(&self, u: usize, v: usize) -> DubinsPath {
        dubins_shortest(self.nodes[u].exit, self.nodes[v].entry, self.radius)
            .expect("radius validated at construction")
    }

    #[inline]
    fn w(&self, u: usize, v: usize) -> f64 {
        self.weights[u * self.nodes.len() + v]
    }

    fn transition_cost(&self, seq: &[usize]) -> f64 {
        seq.windows(2).map(|w| self.w(w[0], w[1])).sum()
    }
}

pub fn build_dubins_graph(passes: &[Pass], r: f64) -> Result<DubinsGraph, DcsError> {
    if passes.is_empty() {
        return Err(DcsError::NoPasses);
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(DubinsError::InvalidRadius(r).into());
    }
    let nodes: Vec<DirectedPassNode> = passes
        .iter()
        .flat_map(|p| {
            [
                DirectedPassNode::new(p, Direction::Ascending),
                DirectedPassNode::new(p, Direction::Descending),
            ]
        })
        .collect();
    let n = nodes.len();
    let mut weights = vec![f64::INFINITY; n * n];
    for u in 0..n {
        for v in 0..n {
            if u / 2 != v / 2 {
                weights[u * n + v] =
                    dubins_shortest(nodes[u].exit, nodes[v].entry, r)?.total_length();
            }
        }
    }
    Ok(DubinsGraph {
        passes: passes.to_vec(),
        nodes,
        weights,
        radius: r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Heuristic,
}

/// Ordered directed passes with the Dubins transitions between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<DirectedPassNode>,
    pub transitions: Vec<DubinsPath>,
    pub interior_cost: f64,
}

impl Route {
    /// Builds a route from graph node indices.
    pub fn from_sequence(graph: &DubinsGraph, seq: &[usize]) -> Self {
        let nodes: Vec<_> = seq.iter().map(|&u| *graph.node(u)).collect();
        let transitions: Vec<_> = seq
            .windows(2)
            .map(|w| graph.transition(w[0], w[1]))
            .collect();
        Self::from_parts(nodes, transitions)
    }

    pub fn from_parts(nodes: Vec<DirectedPassNode>, transitions: Vec<DubinsPath>) -> Self {
        debug_assert_eq!(transitions.len() + 1, nodes.len().max(1));
        let interior_cost = nodes.iter().map(DirectedPassNode::length).sum::<f64>()
            + transitions
                .iter()
                .map(DubinsPath::total_length)
                .sum::<f64>();
        Self {
            nodes,
            transitions,
            interior_cost,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pass_length(&self) -> f64 {
        self.nodes.iter().map(DirectedPassNode::length).sum()
    }

    pub fn pass_ids(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.pass_id).collect()
    }
}

/// Cost of a route flown from the depot and back, with Euclidean depot legs
/// to the first and last pass midpoints.
pub fn route_cost(route: &Route, depot: Point) -> Result<f64, DcsError> {
    let (first, last) = match (route.nodes.first(), route.nodes.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(DcsError::EmptyRoute),
    };
    Ok(depot.distance(&first.midpoint()) + route.interior_cost + last.midpoint().distance(&depot))
}

pub fn solve_route(graph: &DubinsGraph, solver: Solver, seed: u64) -> Result<Route, DcsError> {
    let seq = match solver {
        Solver::Exact => exact_sequence(graph)?,
        Solver::Heuristic => heuristic_sequence(graph, seed),
    };
    Ok(Route::from_sequence(graph, &seq))
}

/// Dynamic program over (visited passes, current node).
fn exact_sequence(graph: &DubinsGraph) -> Result<Vec<usize>, DcsError> {
    let m = graph.group_count();
    if m > EXACT_PASS_LIMIT {
        return Err(DcsError::ExactLimit {
            passes: m,
            limit: EXACT_PASS_LIMIT,
        });
    }
    let n = graph.node_count();
    let full = (1usize << m) - 1;
    let mut cost = vec![f64::INFINITY; (full + 1) * n];
    let mut parent = vec![usize::MAX; (full + 1) * n];
    for u in 0..n {
        cost[(1 << (u / 2)) * n + u] = 0.0;
    }
    for mask in 1..=full {
        for u in 0..n {
            let here = cost[mask * n + u];
            if mask & (1 << (u / 2)) == 0 || !here.is_finite() {
                continue;
            }
            for v in 0..n {
                let g = v / 2;
                if mask & (1 << g) != 0 {
                    continue;
                }
                let next = mask | (1 << g);
                let c = here + graph.w(u, v);
                if c < cost[next * n + v] {
                    cost[next * n + v] = c;
                    parent[next * n + v] = u;
                }
            }
        }
    }
    let mut end = 0;
    for u in 1..n {
        if cost[full * n + u] < cost[full * n + end] {
            end = u;
        }
    }
    let mut seq = vec![end];
    let mut mask = full;
    let mut u = end;
    while parent[mask * n + u] != usize::MAX {
        let p = parent[mask * n + u];
        mask &= !(1 << (u / 2));
        u = p;
        seq.push(u);
    }
    seq.reverse();
    Ok(seq)
}

fn heuristic_sequence(graph: &DubinsGraph, seed: u64) -> Vec<usize> {
    let m = graph.group_count();
    if m == 1 {
        return vec![0];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq = greedy(graph, rng.gen_range(0..graph.node_count()));
    let mut search = LocalSearch { graph };
    search.improve(&mut seq);
    let mut best_cost = graph.transition_cost(&seq);

    let budget = 2 * m;
    let mut stale = 0;
    while stale < budget {
        let mut candidate = seq.clone();
        kick(&mut candidate, &mut rng);
        search.improve(&mut candidate);
        let c = graph.transition_cost(&candidate);
        if c < best_cost - IMPROVE_EPS {
            seq = candidate;
            best_cost = c;
            stale = 0;
        } else {
            stale += 1;
        }
    }
    seq
}

/// Nearest-neighbour construction from `start`.
fn greedy(graph: &DubinsGraph, start: usize) -> Vec<usize> {
    let m = graph.group_count();
    let mut visited = vec![false; m];
    visited[start / 2] = true;
    let mut seq = Vec::with_capacity(m);
    seq.push(start);
    let mut u = start;
    while seq.len() < m {
        let mut best = usize::MAX;
        let mut best_w = f64::INFINITY;
        for v in 0..graph.node_count() {
            if !visited[v / 2] && graph.w(u, v) < best_w {
                best = v;
                best_w = graph.w(u, v);
            }
        }
        visited[best / 2] = true;
        seq.push(best);
        u = best;
    }
    seq
}

fn kick(seq: &mut Vec<usize>, rng: &mut ChaCha8Rng) {
    let n = seq.len();
    if n >= 4 {
        // double bridge: A B C D -> A C B D
        let mut cuts = [
            rng.gen_range(1..n),
            rng.gen_range(1..n),
            rng.gen_range(1..n),
        ];
        cuts.sort_unstable();
        let [a, b, c] = cuts;
        let mut out = Vec::with_capacity(n);
        out.extend_from_slice(&seq[..a]);
        out.extend_from_slice(&seq[b..c]);
        out.extend_from_slice(&seq[a..b]);
        out.extend_from_slice(&seq[c..]);
        *seq = out;
    }
    let i = rng.gen_range(0..n);
    seq[i] ^= 1;
}

struct LocalSearch<'a> {
    graph: &'a DubinsGraph,
}

impl LocalSearch<'_> {
    #[inline]
    fn w(&self, u: usize, v: usize) -> f64 {
        self.graph.w(u, v)
    }

    fn improve(&mut self, seq: &mut Vec<usize>) {
        loop {
            let before = self.graph.transition_cost(seq);
            let moved = self.reverse_segments(seq) | self.relocate_segments(seq);
            let after = self.graph.transition_cost(seq);
            assert!(
                after <= before + IMPROVE_EPS,
                "local search increased cost: {before} -> {after}"
            );
            if !moved {
                break;
            }
        }
    }

    /// Reverses `seq[i..=j]` with every pass flipped; `i == j` flips one pass.
    fn reverse_segments(&self, seq: &mut [usize]) -> bool {
        let n = seq.len();
        let mut moved = false;
        for i in 0..n {
            let mut fwd = 0.0;
            let mut rev = 0.0;
            for j in i..n {
                if j > i {
                    fwd += self.w(seq[j - 1], seq[j]);
                    rev += self.w(seq[j] ^ 1, seq[j - 1] ^ 1);
                }
                let mut old = fwd;
                let mut new = rev;
                if i > 0 {
                    old += self.w(seq[i - 1], seq[i]);
                    new += self.w(seq[i - 1], seq[j] ^ 1);
                }
                if j + 1 < n {
                    old += self.w(seq[j], seq[j + 1]);
                    new += self.w(seq[i] ^ 1, seq[j + 1]);
                }
                if new < old - IMPROVE_EPS {
                    seq[i..=j].reverse();
                    for u in &mut seq[i..=j] {
                        *u ^= 1;
                    }
                    moved = true;
                    break;
                }
            }
        }
        moved
    }

    /// Moves a run of up to three passes elsewhere, optionally reversed.
    fn relocate_segments(&self, seq: &mut Vec<usize>) -> bool {
        let n = seq.len();
        let mut moved = false;
        for len in 1..=3usize.min(n - 1) {
            let mut i = 0;
            while i + len <= n {
                if let Some((p, reversed)) = self.best_insertion(seq, i, len) {
                    let mut segment: Vec<usize> = seq.drain(i..i + len).collect();
                    if reversed {
                        segment.reverse();
                        for u in &mut segment {
                            *u ^= 1;
                        }
                    }
                    seq.splice(p..p, segment);
                    moved = true;
                }
                i += 1;
            }
        }
        moved
    }

    // first improving insertion point in the sequence with the run removed
    fn best_insertion(&self, seq: &[usize], i: usize, len: usize) -> Option<(usize, bool)> {
        let n = seq.len();
        let first = seq[i];
        let last = seq[i + len - 1];
        let prev = i.checked_sub(1).map(|k| seq[k]);
        let next = (i + len < n).then(|| seq[i + len]);
        let mut remove = 0.0;
        if let Some(p) = prev {
            remove += self.w(p, first);
        }
        if let Some(q) = next {
            remove += self.w(last, q);
        }
        if let (Some(p), Some(q)) = (prev, next) {
            remove -= self.w(p, q);
        }
        let internal: f64 = seq[i..i + len].windows(2).map(|w| self.w(w[0], w[1])).sum();
        let internal_rev: f64 = seq[i..i + len]
            .windows(2)
            .map(|w| self.w(w[1] ^ 1, w[0] ^ 1))
            .sum();

        let rest = |k: usize| if k < i { seq[k] } else { seq[k + len] };
        let m = n - len;
        for p in 0..=m {
            if p == i {
                continue;
            }
            let before = p.checked_sub(1).map(rest);
            let after = (p < m).then(|| rest(p));
            let base = match (before, after) {
                (Some(a), Some(b)) => self.w(a, b),
                _ => 0.0,
            };
            for reversed in [false, true] {
                let (head, tail, inner) = if reversed {
                    (last ^ 1, first ^ 1, internal_rev - internal)
                } else {
                    (first, last, 0.0)
                };
                let mut add = inner - base;
                if let Some(a) = before {
                    add += self.w(a, head);
                }
                if let Some(b) = after {
                    add += self.w(tail, b);
                }
                if add < remove - IMPROVE_EPS {
                    return Some((p, reversed));
                }
            }
        }
        None
    }
}
