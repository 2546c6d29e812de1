//! Exact shortest-path betweenness centrality.
//!
//! Per-source accumulation over the shortest-path DAG (Brandes), with all
//! tied shortest paths receiving equal fractional credit. Scores are
//! unnormalized pair counts; in undirected mode each unordered pair is
//! counted once.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use super::EmailGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Undirected,
    Directed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    #[default]
    Unweighted,
    /// Edge length 1/weight: heavier traffic means a shorter path.
    InverseWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BetweennessOptions {
    pub direction: Direction,
    pub weighting: Weighting,
}

/// Node betweenness, indexed like `graph.nodes()`.
///
/// Disconnected graphs are handled per component. Sources are processed in
/// index order and summed in fixed order, so results are bit-stable.
pub fn betweenness_centrality(graph: &EmailGraph, options: &BetweennessOptions) -> Vec<f64> {
    let adjacency = match options.direction {
        Direction::Directed => graph.out_adjacency(),
        Direction::Undirected => graph.undirected_adjacency(),
    };
    let n = adjacency.len();
    let mut scores = vec![0.0; n];
    let mut state = BrandesState::new(n);
    for source in 0..n as u32 {
        match options.weighting {
            Weighting::Unweighted => state.bfs(&adjacency, source),
            Weighting::InverseWeight => state.dijkstra(&adjacency, source),
        }
        state.accumulate_nodes(source, &mut scores);
    }
    if options.direction == Direction::Undirected {
        for s in &mut scores {
            *s /= 2.0;
        }
    }
    scores
}

/// Scratch space reused across sources.
pub(crate) struct BrandesState {
    /// Visit order; popped in reverse for dependency accumulation.
    pub order: Vec<u32>,
    pub predecessors: Vec<Vec<u32>>,
    /// Shortest-path counts from the current source.
    pub sigma: Vec<f64>,
    pub dist: Vec<f64>,
    pub delta: Vec<f64>,
}

const UNREACHED: f64 = f64::INFINITY;

impl BrandesState {
    pub fn new(n: usize) -> Self {
        BrandesState {
            order: Vec::with_capacity(n),
            predecessors: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![UNREACHED; n],
            delta: vec![0.0; n],
        }
    }

    fn reset(&mut self, n: usize) {
        self.order.clear();
        for p in &mut self.predecessors {
            p.clear();
        }
        self.sigma[..n].fill(0.0);
        self.dist[..n].fill(UNREACHED);
        self.delta[..n].fill(0.0);
    }

    pub fn bfs(&mut self, adjacency: &[Vec<(u32, u64)>], source: u32) {
        self.reset(adjacency.len());
        self.sigma[source as usize] = 1.0;
        self.dist[source as usize] = 0.0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            self.order.push(v);
            let dv = self.dist[v as usize];
            for &(w, _) in &adjacency[v as usize] {
                let wi = w as usize;
                if self.dist[wi] == UNREACHED {
                    self.dist[wi] = dv + 1.0;
                    queue.push_back(w);
                }
                if self.dist[wi] == dv + 1.0 {
                    self.sigma[wi] += self.sigma[v as usize];
                    self.predecessors[wi].push(v);
                }
            }
        }
    }

    pub fn dijkstra(&mut self, adjacency: &[Vec<(u32, u64)>], source: u32) {
        self.reset(adjacency.len());
        self.sigma[source as usize] = 1.0;
        self.dist[source as usize] = 0.0;
        let mut settled = vec![false; adjacency.len()];
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapEntry { dist, node }) = heap.pop() {
            let vi = node as usize;
            if settled[vi] {
                continue;
            }
            settled[vi] = true;
            self.order.push(node);
            for &(w, weight) in &adjacency[vi] {
                let wi = w as usize;
                let candidate = dist + 1.0 / weight as f64;
                if self.dist[wi] == UNREACHED || candidate < self.dist[wi] - tie_eps(candidate) {
                    self.dist[wi] = candidate;
                    self.sigma[wi] = self.sigma[vi];
                    self.predecessors[wi].clear();
                    self.predecessors[wi].push(node);
                    heap.push(HeapEntry {
                        dist: candidate,
                        node: w,
                    });
                } else if (candidate - self.dist[wi]).abs() <= tie_eps(candidate) && !settled[wi] {
                    self.sigma[wi] += self.sigma[vi];
                    self.predecessors[wi].push(node);
                }
            }
        }
    }

    /// Back-propagate pair dependencies; adds this source's contribution.
    fn accumulate_nodes(&mut self, source: u32, scores: &mut [f64]) {
        for &w in self.order.iter().rev() {
            let wi = w as usize;
            let coeff = (1.0 + self.delta[wi]) / self.sigma[wi];
            for &v in &self.predecessors[wi] {
                self.delta[v as usize] += self.sigma[v as usize] * coeff;
            }
            if w != source {
                scores[wi] += self.delta[wi];
            }
        }
    }
}

fn tie_eps(reference: f64) -> f64 {
    1e-12 * reference.abs().max(1.0)
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance; node index breaks ties deterministically.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
