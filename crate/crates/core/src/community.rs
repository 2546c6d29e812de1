//! Divisive community detection: repeatedly remove the edge with maximal
//! shortest-path betweenness, checkpointing every time the graph splits,
//! and pick the checkpoint with the best modularity.
//!
//! Edge betweenness runs on the undirected unweighted projection; the
//! original weights are kept for modularity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EmailGraph;

/// One split event: the removal that increased the component count, the
/// resulting partition, and its modularity on the original graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub removed_edge: (String, String),
    pub components: usize,
    /// Communities as sorted node-id lists, sorted by first member.
    pub partition: Vec<Vec<String>>,
    pub modularity: f64,
}

/// The checkpoint sequence recorded during divisive splitting. Component
/// counts strictly increase along the list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dendrogram {
    pub checkpoints: Vec<Checkpoint>,
}

/// When to stop removing edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GnStop {
    /// Stop once the graph has at least this many components.
    TargetComponents(usize),
    /// Remove every edge.
    Exhaust,
}

/// Shortest-path betweenness of every edge on the undirected unweighted
/// projection, with fractional credit over tied shortest paths. Each
/// unordered pair is counted once; keys are `(min_id, max_id)`.
pub fn edge_betweenness(graph: &EmailGraph) -> BTreeMap<(String, String), f64> {
    let adjacency = to_sets(graph);
    edge_betweenness_indexed(&adjacency)
        .into_iter()
        .map(|((a, b), score)| {
            let mut ids = [graph.node(a).id.clone(), graph.node(b).id.clone()];
            ids.sort();
            let [x, y] = ids;
            ((x, y), score)
        })
        .collect()
}

fn to_sets(graph: &EmailGraph) -> Vec<BTreeSet<u32>> {
    let mut adjacency = vec![BTreeSet::new(); graph.node_count()];
    for e in graph.edges() {
        if e.src != e.dst {
            adjacency[e.src as usize].insert(e.dst);
            adjacency[e.dst as usize].insert(e.src);
        }
    }
    adjacency
}

/// Brandes edge accumulation on a symmetric adjacency; scores keyed by
/// `(min, max)` index pairs, unordered pairs counted once.
fn edge_betweenness_indexed(adjacency: &[BTreeSet<u32>]) -> BTreeMap<(u32, u32), f64> {
    let n = adjacency.len();
    let mut scores: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (i, set) in adjacency.iter().enumerate() {
        for &j in set.iter().filter(|&&j| (i as u32) < j) {
            scores.insert((i as u32, j), 0.0);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut predecessors = vec![Vec::<u32>::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    for source in 0..n as u32 {
        order.clear();
        for p in &mut predecessors {
            p.clear();
        }
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        sigma[source as usize] = 1.0;
        dist[source as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adjacency[v as usize] {
                let wi = w as usize;
                if dist[wi] < 0 {
                    dist[wi] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
                if dist[wi] == dist[v as usize] + 1 {
                    sigma[wi] += sigma[v as usize];
                    predecessors[wi].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            let wi = w as usize;
            let coeff = (1.0 + delta[wi]) / sigma[wi];
            for &v in &predecessors[wi] {
                let contribution = sigma[v as usize] * coeff;
                delta[v as usize] += contribution;
                let key = (v.min(w), v.max(w));
                *scores.get_mut(&key).expect("edge exists") += contribution;
            }
        }
    }
    // Each unordered pair was seen from both endpoints.
    for score in scores.values_mut() {
        *score /= 2.0;
    }
    scores
}

/// Run the divisive split until `stop`, recording a checkpoint whenever
/// the component count grows.
///
/// Deterministic: betweenness ties break to the lexicographically smallest
/// `(src_id, dst_id)` endpoint pair. An edgeless graph yields an empty
/// dendrogram.
pub fn girvan_newman(graph: &EmailGraph, stop: GnStop) -> Dendrogram {
    let mut adjacency = to_sets(graph);
    let mut dendrogram = Dendrogram::default();
    let mut components = count_components(&adjacency);
    loop {
        if let GnStop::TargetComponents(target) = stop {
            if components >= target {
                break;
            }
        }
        let scores = edge_betweenness_indexed(&adjacency);
        if scores.is_empty() {
            break;
        }
        let max = scores.values().fold(0.0f64, |acc, &s| acc.max(s));
        let tolerance = 1e-9 * max.max(1.0);
        let (a, b) = scores
            .iter()
            .filter(|(_, &s)| max - s <= tolerance)
            .map(|(&(a, b), _)| edge_id_pair(graph, a, b))
            .min()
            .map(|(x, y)| {
                let a = graph.node_index(&x).expect("node id");
                let b = graph.node_index(&y).expect("node id");
                (a, b)
            })
            .expect("non-empty scores");
        adjacency[a as usize].remove(&b);
        adjacency[b as usize].remove(&a);
        let (count, labels) = components_with_labels(&adjacency);
        if count > components {
            components = count;
            let partition = labels_to_partition(graph, &labels, count);
            let q = modularity(graph, &partition).expect("components partition the nodes");
            dendrogram.checkpoints.push(Checkpoint {
                removed_edge: edge_id_pair(graph, a, b),
                components: count,
                partition,
                modularity: q,
            });
        }
    }
    dendrogram
}

fn edge_id_pair(graph: &EmailGraph, a: u32, b: u32) -> (String, String) {
    let mut ids = [graph.node(a).id.clone(), graph.node(b).id.clone()];
    ids.sort();
    let [x, y] = ids;
    (x, y)
}

fn count_components(adjacency: &[BTreeSet<u32>]) -> usize {
    components_with_labels(adjacency).0
}

fn components_with_labels(adjacency: &[BTreeSet<u32>]) -> (usize, Vec<usize>) {
    let n = adjacency.len();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        let label = count;
        count += 1;
        let mut queue = VecDeque::from([start]);
        labels[start] = label;
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                let wi = w as usize;
                if labels[wi] == usize::MAX {
                    labels[wi] = label;
                    queue.push_back(wi);
                }
            }
        }
    }
    (count, labels)
}

fn labels_to_partition(graph: &EmailGraph, labels: &[usize], count: usize) -> Vec<Vec<String>> {
    let mut partition = vec![Vec::new(); count];
    for (i, &label) in labels.iter().enumerate() {
        partition[label].push(graph.node(i as u32).id.clone());
    }
    for group in &mut partition {
        group.sort();
    }
    partition.sort();
    partition
}

/// Modularity of a partition on the weighted undirected projection:
/// `Q = sum_c (e_c/m - (d_c/2m)^2)` with `m` the total undirected weight,
/// `e_c` the intra-community weight and `d_c` the community degree sum.
pub fn modularity(graph: &EmailGraph, partition: &[Vec<String>]) -> Result<f64> {
    let mut community_of = BTreeMap::new();
    for (c, group) in partition.iter().enumerate() {
        for id in group {
            if community_of.insert(id.as_str(), c).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "node {id:?} appears in more than one community"
                )));
            }
        }
    }
    let mut membership = Vec::with_capacity(graph.node_count());
    for node in graph.nodes() {
        let c = community_of.get(node.id.as_str()).ok_or_else(|| {
            Error::InvalidArgument(format!("partition does not cover node {:?}", node.id))
        })?;
        membership.push(*c);
    }
    if community_of.len() != graph.node_count() {
        return Err(Error::InvalidArgument(
            "partition names nodes that are not in the graph".into(),
        ));
    }
    let communities = partition.len();
    let mut intra = vec![0.0f64; communities];
    let mut degree = vec![0.0f64; communities];
    let mut total = 0.0f64;
    for e in graph.edges() {
        let w = e.weight as f64;
        total += w;
        let (cs, cd) = (membership[e.src as usize], membership[e.dst as usize]);
        degree[cs] += w;
        degree[cd] += w;
        if cs == cd {
            intra[cs] += w;
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    let q = (0..communities)
        .map(|c| intra[c] / total - (degree[c] / (2.0 * total)).powi(2))
        .sum();
    Ok(q)
}

/// The checkpoint with maximal modularity; the earliest wins ties.
pub fn best_partition(dendrogram: &Dendrogram) -> Result<&Checkpoint> {
    let mut best: Option<&Checkpoint> = None;
    for checkpoint in &dendrogram.checkpoints {
        if best.is_none_or(|b| checkpoint.modularity > b.modularity) {
            best = Some(checkpoint);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty dendrogram".into()))
}
