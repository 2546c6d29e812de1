//! Brute-force reference implementations for the test suites.
//!
//! Everything here recomputes a quantity by exhaustive enumeration,
//! independently of the production algorithms it is used to check, and is
//! only compiled with the `oracles` feature (enabled by the test targets).

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::graph::{EmailGraph, GraphEdge, GraphNode};

/// Symmetric unweighted adjacency of the undirected projection.
pub fn undirected_sets(graph: &EmailGraph) -> Vec<Vec<u32>> {
    let mut adjacency = vec![Vec::new(); graph.node_count()];
    for e in graph.edges() {
        if e.src == e.dst {
            continue;
        }
        if !adjacency[e.src as usize].contains(&e.dst) {
            adjacency[e.src as usize].push(e.dst);
            adjacency[e.dst as usize].push(e.src);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    adjacency
}

fn bfs_distances(adjacency: &[Vec<u32>], source: u32) -> Vec<i64> {
    let mut dist = vec![-1i64; adjacency.len()];
    dist[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v as usize] {
            if dist[w as usize] < 0 {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Every shortest path from `s` to `t`, as node sequences.
pub fn all_shortest_paths(adjacency: &[Vec<u32>], s: u32, t: u32) -> Vec<Vec<u32>> {
    let dist = bfs_distances(adjacency, s);
    if dist[t as usize] < 0 {
        return Vec::new();
    }
    // Walk backwards from t along strictly decreasing distances.
    let mut paths = Vec::new();
    let mut stack = vec![vec![t]];
    while let Some(path) = stack.pop() {
        let head = *path.last().expect("non-empty");
        if head == s {
            let mut forward = path.clone();
            forward.reverse();
            paths.push(forward);
            continue;
        }
        for &prev in &adjacency[head as usize] {
            if dist[prev as usize] == dist[head as usize] - 1 {
                let mut extended = path.clone();
                extended.push(prev);
                stack.push(extended);
            }
        }
    }
    paths
}

/// Node betweenness by explicit enumeration of all shortest paths, each
/// unordered pair counted once, tied paths sharing credit equally.
pub fn node_betweenness(adjacency: &[Vec<u32>]) -> Vec<f64> {
    let n = adjacency.len();
    let mut scores = vec![0.0; n];
    for s in 0..n as u32 {
        for t in (s + 1)..n as u32 {
            let paths = all_shortest_paths(adjacency, s, t);
            if paths.is_empty() {
                continue;
            }
            let credit = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    scores[v as usize] += credit;
                }
            }
        }
    }
    scores
}

/// Edge betweenness by the same enumeration; keys are `(min, max)` pairs.
pub fn edge_betweenness(adjacency: &[Vec<u32>]) -> BTreeMap<(u32, u32), f64> {
    let n = adjacency.len();
    let mut scores: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (i, neighbors) in adjacency.iter().enumerate() {
        for &j in neighbors {
            if (i as u32) < j {
                scores.insert((i as u32, j), 0.0);
            }
        }
    }
    for s in 0..n as u32 {
        for t in (s + 1)..n as u32 {
            let paths = all_shortest_paths(adjacency, s, t);
            if paths.is_empty() {
                continue;
            }
            let credit = 1.0 / paths.len() as f64;
            for path in &paths {
                for pair in path.windows(2) {
                    let key = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                    *scores.get_mut(&key).expect("edge on path") += credit;
                }
            }
        }
    }
    scores
}

/// Modularity by the pairwise definition
/// `Q = (1/2m) * sum_ij (A_ij - k_i k_j / 2m) [c_i = c_j]`
/// on the weighted undirected projection, a different algebraic route
/// than the per-community sums used in production.
pub fn modularity(graph: &EmailGraph, membership: &[usize]) -> f64 {
    let n = graph.node_count();
    let mut a = vec![vec![0.0f64; n]; n];
    for e in graph.edges() {
        if e.src == e.dst {
            continue;
        }
        a[e.src as usize][e.dst as usize] += e.weight as f64;
        a[e.dst as usize][e.src as usize] += e.weight as f64;
    }
    let two_m: f64 = a.iter().flatten().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let degree: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if membership[i] == membership[j] {
                q += a[i][j] - degree[i] * degree[j] / two_m;
            }
        }
    }
    q / two_m
}

/// All partitions of `{0..n}` as membership vectors, via restricted
/// growth strings. Only sane for small `n`.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn recurse(
        current: &mut Vec<usize>,
        position: usize,
        max_label: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if position == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_label + 1 {
            current[position] = label;
            recurse(current, position + 1, max_label.max(label), out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    recurse(&mut current, 1, 0, &mut out);
    out
}

/// Deterministic G(n, p) corpus graph with unit weights.
pub fn random_graph(seed: u64, n: usize, p: f64) -> EmailGraph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .map(|i| GraphNode::address(format!("n{i:02}")))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push(GraphEdge {
                    src: i,
                    dst: j,
                    weight: 1,
                });
            }
        }
    }
    EmailGraph::from_parts(nodes, edges).expect("valid corpus graph")
}

/// Directed adjacency with explicit edge lengths (1 or 1/weight).
pub fn directed_lengths(graph: &EmailGraph, inverse_weight: bool) -> Vec<Vec<(u32, f64)>> {
    let mut adjacency = vec![Vec::new(); graph.node_count()];
    for e in graph.edges() {
        if e.src == e.dst {
            continue;
        }
        let length = if inverse_weight {
            1.0 / e.weight as f64
        } else {
            1.0
        };
        adjacency[e.src as usize].push((e.dst, length));
    }
    adjacency
}

/// Undirected projection with explicit edge lengths; opposite directions
/// fold by weight sum before inversion.
pub fn undirected_lengths(graph: &EmailGraph, inverse_weight: bool) -> Vec<Vec<(u32, f64)>> {
    let mut folded: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for e in graph.edges() {
        if e.src != e.dst {
            *folded.entry((e.src.min(e.dst), e.src.max(e.dst))).or_insert(0) += e.weight;
        }
    }
    let mut adjacency = vec![Vec::new(); graph.node_count()];
    for ((a, b), weight) in folded {
        let length = if inverse_weight {
            1.0 / weight as f64
        } else {
            1.0
        };
        adjacency[a as usize].push((b, length));
        adjacency[b as usize].push((a, length));
    }
    adjacency
}

/// All-pairs distances by Floyd-Warshall.
pub fn pairwise_distances(adjacency: &[Vec<(u32, f64)>]) -> Vec<Vec<f64>> {
    let n = adjacency.len();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
        for &(j, length) in &adjacency[i] {
            row[j as usize] = row[j as usize].min(length);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

fn weighted_tie_eps(reference: f64) -> f64 {
    1e-12 * reference.abs().max(1.0)
}

/// Every shortest path from `s` to `t` under explicit lengths, walking
/// forward along edges that sit on some shortest path.
pub fn all_shortest_paths_weighted(
    adjacency: &[Vec<(u32, f64)>],
    dist: &[Vec<f64>],
    s: u32,
    t: u32,
) -> Vec<Vec<u32>> {
    if !dist[s as usize][t as usize].is_finite() {
        return Vec::new();
    }
    let mut paths = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(path) = stack.pop() {
        let head = *path.last().expect("non-empty");
        if head == t {
            paths.push(path);
            continue;
        }
        let remaining = dist[head as usize][t as usize];
        for &(next, length) in &adjacency[head as usize] {
            let through = length + dist[next as usize][t as usize];
            if (through - remaining).abs() <= weighted_tie_eps(remaining) {
                let mut extended = path.clone();
                extended.push(next);
                stack.push(extended);
            }
        }
    }
    paths
}

/// Node betweenness by enumeration under explicit lengths; `ordered`
/// selects directed (ordered pairs) vs undirected (each unordered pair
/// once) counting.
pub fn node_betweenness_weighted(adjacency: &[Vec<(u32, f64)>], ordered: bool) -> Vec<f64> {
    let n = adjacency.len();
    let dist = pairwise_distances(adjacency);
    let mut scores = vec![0.0; n];
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            if s == t || (!ordered && s > t) {
                continue;
            }
            let paths = all_shortest_paths_weighted(adjacency, &dist, s, t);
            if paths.is_empty() {
                continue;
            }
            let credit = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    scores[v as usize] += credit;
                }
            }
        }
    }
    scores
}

/// Deterministic G(n, p) graph with directed edges and power-of-two
/// weights (exact dyadic inverse lengths, so shortest-path ties are
/// exact in both the oracle and the production arithmetic).
pub fn random_weighted_digraph(seed: u64, n: usize, p: f64) -> EmailGraph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .map(|i| GraphNode::address(format!("n{i:02}")))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i != j && rng.random::<f64>() < p {
                edges.push(GraphEdge {
                    src: i,
                    dst: j,
                    weight: 1 << rng.random_range(0..3),
                });
            }
        }
    }
    EmailGraph::from_parts(nodes, edges).expect("valid corpus graph")
}
