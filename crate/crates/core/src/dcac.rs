//! Area clustering: partition the pass graph into `k` connected clusters by
//! breadth-first growth, then plan one single-robot route per cluster.

use std::collections::{BTreeSet, VecDeque};

use crate::dcs::{build_dubins_graph, solve_route};
use crate::grid::{OccupancyGrid, Point};
use crate::passes::PassGraph;
use crate::plan::{check_inputs, Decomposition, PlanConfig, PlanError};
use crate::tour::Tour;

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub id: usize,
    /// Sorted pass ids.
    pub pass_ids: Vec<usize>,
    /// Cost of the BFS tree spanning the cluster from its seed.
    pub size: f64,
    /// Vertex the cluster was grown from.
    pub seed: Option<usize>,
}

impl Cluster {
    fn new(id: usize, members: Vec<usize>, seed: Option<usize>, graph: &PassGraph) -> Self {
        let members_set: BTreeSet<usize> = members.iter().copied().collect();
        let size = forest_cost(graph, &members_set, seed);
        Self {
            id,
            pass_ids: members_set.into_iter().collect(),
            size,
            seed,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pass_ids.is_empty()
    }
}

/// BFS order over `allowed` from `start`, with the cost of each tree edge.
fn bfs_order(graph: &PassGraph, allowed: &BTreeSet<usize>, start: usize) -> Vec<(usize, f64)> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut order = vec![(start, 0.0)];
    while let Some(u) = queue.pop_front() {
        for &(v, c) in graph.neighbors(u) {
            if allowed.contains(&v) && seen.insert(v) {
                queue.push_back(v);
                order.push((v, c));
            }
        }
    }
    order
}

/// Total BFS-tree cost over the subgraph induced by `members`, starting at
/// `seed` and then at the smallest unreached vertex of each remaining piece.
fn forest_cost(graph: &PassGraph, members: &BTreeSet<usize>, seed: Option<usize>) -> f64 {
    let mut left = members.clone();
    let mut total = 0.0;
    let mut start = seed.filter(|s| left.contains(s));
    while let Some(s) = start.take().or_else(|| left.first().copied()) {
        for (v, c) in bfs_order(graph, &left, s) {
            total += c;
            left.remove(&v);
        }
    }
    total
}

fn pieces(graph: &PassGraph, members: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut left = members.clone();
    let mut out = Vec::new();
    while let Some(&s) = left.first() {
        let piece: BTreeSet<usize> = bfs_order(graph, &left, s)
            .into_iter()
            .map(|(v, _)| v)
            .collect();
        for v in &piece {
            left.remove(v);
        }
        out.push(piece);
    }
    out
}

fn nearest(graph: &PassGraph, candidates: &BTreeSet<usize>, depot: Point) -> Option<usize> {
    candidates.iter().copied().min_by(|&a, &b| {
        let da = graph.midpoint(a).distance(&depot);
        let db = graph.midpoint(b).distance(&depot);
        da.total_cmp(&db).then(a.cmp(&b))
    })
}

/// Splits one connected component into `parts` clusters.
fn cluster_component(
    graph: &PassGraph,
    component: &[usize],
    parts: usize,
    depot: Point,
) -> Vec<(Vec<usize>, Option<usize>)> {
    let mut unassigned: BTreeSet<usize> = component.iter().copied().collect();
    let mut clusters: Vec<(Vec<usize>, Option<usize>)> = Vec::with_capacity(parts);
    for i in 0..parts {
        let remaining = parts - i;
        let Some(seed) = nearest(graph, &unassigned, depot) else {
            clusters.push((Vec::new(), None));
            continue;
        };
        if remaining == 1 {
            clusters.push((unassigned.iter().copied().collect(), Some(seed)));
            unassigned.clear();
            continue;
        }
        // the j - 1 boundaries still to come each cut one tree edge, so
        // discount them at the mean edge cost before sharing out the rest
        let forest = forest_cost(graph, &unassigned, Some(seed));
        let edges = unassigned.len() - pieces(graph, &unassigned).len();
        let mean_edge = if edges > 0 {
            forest / edges as f64
        } else {
            0.0
        };
        let target = ((forest - (remaining - 1) as f64 * mean_edge) / remaining as f64).max(0.0);
        let max_take = unassigned.len().saturating_sub(remaining - 1).max(1);
        let mut members = Vec::new();
        let mut size = 0.0;
        for (v, c) in bfs_order(graph, &unassigned, seed) {
            if members.len() == max_take {
                break;
            }
            // take the next vertex only if it brings the size closer to target
            if !members.is_empty() && (size + c - target).abs() >= (size - target).abs() {
                break;
            }
            size += c;
            members.push(v);
        }
        for v in &members {
            unassigned.remove(v);
        }
        clusters.push((members, Some(seed)));
    }

    // the final cluster may be fragmented; fold stray pieces into the
    // lightest adjacent cluster
    if let Some((last_members, last_seed)) = clusters.last().cloned() {
        let set: BTreeSet<usize> = last_members.iter().copied().collect();
        let mut frags = pieces(graph, &set);
        if frags.len() > 1 {
            frags.sort_by(|a, b| b.len().cmp(&a.len()).then(a.first().cmp(&b.first())));
            let keep = frags.remove(0);
            let last = clusters.len() - 1;
            let seed = last_seed
                .filter(|s| keep.contains(s))
                .or(keep.first().copied());
            clusters[last] = (keep.into_iter().collect(), seed);
            for frag in frags {
                let owner = (0..last)
                    .filter(|&c| {
                        clusters[c]
                            .0
                            .iter()
                            .any(|&u| graph.neighbors(u).iter().any(|(v, _)| frag.contains(v)))
                    })
                    .min_by(|&a, &b| {
                        let sa = forest_cost(
                            graph,
                            &clusters[a].0.iter().copied().collect(),
                            clusters[a].1,
                        );
                        let sb = forest_cost(
                            graph,
                            &clusters[b].0.iter().copied().collect(),
                            clusters[b].1,
                        );
                        sa.total_cmp(&sb).then(a.cmp(&b))
                    })
                    .unwrap_or(last);
                clusters[owner].0.extend(frag);
            }
        }
    }
    clusters
}

/// Robots per component, largest-remainder on component size, at least one
/// per component and at most one per pass.
fn apportion(sizes: &[f64], counts: &[usize], k: usize) -> Vec<usize> {
    let c = sizes.len();
    let total: f64 = sizes.iter().sum();
    let quota: Vec<f64> = if total > 0.0 {
        sizes.iter().map(|s| k as f64 * s / total).collect()
    } else {
        let n: usize = counts.iter().sum();
        counts
            .iter()
            .map(|&m| k as f64 * m as f64 / n as f64)
            .collect()
    };
    let mut alloc: Vec<usize> = (0..c)
        .map(|i| (quota[i].floor() as usize).clamp(1, counts[i]))
        .collect();
    let capacity: usize = counts.iter().sum::<usize>().min(k);
    while alloc.iter().sum::<usize>() < capacity {
        let i = (0..c)
            .filter(|&i| alloc[i] < counts[i])
            .max_by(|&a, &b| {
                (quota[a] - alloc[a] as f64)
                    .total_cmp(&(quota[b] - alloc[b] as f64))
                    .then(b.cmp(&a))
            })
            .expect("capacity not reached");
        alloc[i] += 1;
    }
    while alloc.iter().sum::<usize>() > k {
        let i = (0..c)
            .filter(|&i| alloc[i] > 1)
            .min_by(|&a, &b| {
                (quota[a] - alloc[a] as f64)
                    .total_cmp(&(quota[b] - alloc[b] as f64))
                    .then(b.cmp(&a))
            })
            .expect("k >= component count");
        alloc[i] -= 1;
    }
    alloc
}

/// Partitions the pass graph into `k` clusters, growing each from the
/// unassigned pass nearest the depot.
///
/// Connected components are clustered independently. When `k` is smaller
/// than the number of components, whole components are packed into the
/// lightest cluster instead. Clusters beyond the pass count are empty.
pub fn bfs_clustering(
    graph: &PassGraph,
    k: usize,
    depot: Point,
) -> Result<Vec<Cluster>, PlanError> {
    if k < 1 {
        return Err(PlanError::InvalidRobotCount(k));
    }
    let mut components = graph.components();
    if components.is_empty() {
        return Err(PlanError::NoFreeSpace);
    }
    // nearest component first
    components.sort_by(|a, b| {
        let da = a
            .iter()
            .map(|&v| graph.midpoint(v).distance(&depot))
            .fold(f64::INFINITY, f64::min);
        let db = b
            .iter()
            .map(|&v| graph.midpoint(v).distance(&depot))
            .fold(f64::INFINITY, f64::min);
        da.total_cmp(&db).then(a[0].cmp(&b[0]))
    });
    let sizes: Vec<f64> = components
        .iter()
        .map(|c| {
            let set = c.iter().copied().collect();
            forest_cost(graph, &set, nearest(graph, &set, depot))
        })
        .collect();

    let mut raw: Vec<(Vec<usize>, Option<usize>)> = Vec::with_capacity(k);
    if k >= components.len() {
        let counts: Vec<usize> = components.iter().map(Vec::len).collect();
        let alloc = apportion(&sizes, &counts, k);
        for (comp, parts) in components.iter().zip(alloc) {
            raw.extend(cluster_component(graph, comp, parts, depot));
        }
    } else {
        let mut order: Vec<usize> = (0..components.len()).collect();
        order.sort_by(|&a, &b| sizes[b].total_cmp(&sizes[a]).then(a.cmp(&b)));
        let mut load = vec![0.0f64; k];
        raw = vec![(Vec::new(), None); k];
        for ci in order {
            let bin = (0..k)
                .min_by(|&a, &b| load[a].total_cmp(&load[b]).then(a.cmp(&b)))
                .unwrap();
            load[bin] += sizes[ci];
            raw[bin].0.extend(&components[ci]);
        }
        for (members, seed) in &mut raw {
            *seed = nearest(graph, &members.iter().copied().collect(), depot);
        }
    }
    raw.resize(k, (Vec::new(), None));
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(id, (members, seed))| Cluster::new(id, members, seed, graph))
        .collect())
}

#[derive(Debug, Clone)]
pub struct DcacPlan {
    pub decomposition: Decomposition,
    pub clusters: Vec<Cluster>,
    pub tours: Vec<Tour>,
}

/// Plans `k` tours by clustering passes first and routing each cluster.
pub fn dcac(k: usize, grid: &OccupancyGrid, config: &PlanConfig) -> Result<DcacPlan, PlanError> {
    check_inputs(k, grid)?;
    let decomposition = Decomposition::new(grid, config.footprint)?;
    let clusters = bfs_clustering(&decomposition.graph, k, grid.depot())?;
    let mut tours = Vec::with_capacity(k);
    for cluster in &clusters {
        if cluster.is_empty() {
            tours.push(Tour::idle(cluster.id));
            continue;
        }
        let passes: Vec<_> = cluster
            .pass_ids
            .iter()
            .map(|&id| decomposition.passes[id].clone())
            .collect();
        let graph = build_dubins_graph(&passes, config.radius)?;
        let route = solve_route(&graph, config.solver, config.seed)?;
        tours.push(Tour::new(cluster.id, route, grid.depot()));
    }
    Ok(DcacPlan {
        decomposition,
        clusters,
        tours,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::bcd;
    use crate::passes::{gen_all_passes, pass_graph};

    /// Single strip map: passes form a path graph with equal edge costs.
    fn strip_graph(passes: usize) -> PassGraph {
        let g = OccupancyGrid::from_fn(passes, 6, 1.0, Point::new(0.0, 0.0), |_, _| true).unwrap();
        let cells = bcd(&g);
        let p = gen_all_passes(&cells, 1.0).unwrap();
        pass_graph(&p, &cells)
    }

    #[test]
    fn one_robot_one_cluster() {
        let g = strip_graph(5);
        let c = bfs_clustering(&g, 1, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].pass_ids, vec![0, 1, 2, 3, 4]);
        assert!((c[0].size - 4.0).abs() < 1e-12);
    }

    #[test]
    fn path_graph_two_robots() {
        let g = strip_graph(4);
        let c = bfs_clustering(&g, 2, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c[0].pass_ids, vec![0, 1]);
        assert_eq!(c[1].pass_ids, vec![2, 3]);
    }

    #[test]
    fn singletons_when_k_equals_passes() {
        let g = strip_graph(6);
        let c = bfs_clustering(&g, 6, Point::new(0.0, 0.0)).unwrap();
        for (i, cl) in c.iter().enumerate() {
            assert_eq!(cl.pass_ids, vec![i]);
        }
    }

    #[test]
    fn more_robots_than_passes() {
        let g = strip_graph(2);
        let c = bfs_clustering(&g, 4, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c.iter().filter(|c| !c.is_empty()).count(), 2);
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn zero_robots_rejected() {
        let g = strip_graph(2);
        assert_eq!(
            bfs_clustering(&g, 0, Point::new(0.0, 0.0)),
            Err(PlanError::InvalidRobotCount(0))
        );
    }

    #[test]
    fn apportion_rules() {
        assert_eq!(apportion(&[3.0, 1.0], &[10, 10], 4), vec![3, 1]);
        assert_eq!(apportion(&[10.0, 0.0], &[10, 1], 3), vec![2, 1]);
        assert_eq!(apportion(&[1.0, 1.0], &[1, 1], 5), vec![1, 1]);
        assert_eq!(apportion(&[5.0, 5.0, 0.0], &[4, 4, 1], 4), vec![2, 1, 1]);
    }

    #[test]
    fn disconnected_components_not_mixed() {
        // two strips separated by an obstacle column
        let g = OccupancyGrid::from_fn(9, 4, 1.0, Point::new(0.0, 0.0), |c, _| c != 4).unwrap();
        let cells = bcd(&g);
        let p = gen_all_passes(&cells, 1.0).unwrap();
        let graph = pass_graph(&p, &cells);
        let c = bfs_clustering(&graph, 2, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c[0].pass_ids, vec![0, 1, 2, 3]);
        assert_eq!(c[1].pass_ids, vec![4, 5, 6, 7]);
        // fewer robots than components packs whole components
        let c = bfs_clustering(&graph, 1, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c[0].pass_ids.len(), 8);
    }
}
