//! Directed weighted email graphs and their aggregations.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::EmailRecord;
use crate::orgmap::UnitCategory;

pub mod centrality;
pub mod tally;

pub use centrality::{betweenness_centrality, BetweennessOptions, Direction, Weighting};
pub use tally::{external_domain_tally, CategoryCounts, CommTally, TallyKey, TldClass, TldConfig};

/// What a graph node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Address,
    Unit,
    Category,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub id: String,
    /// Display name; falls back to `id` when absent.
    pub name: Option<String>,
    pub category: Option<UnitCategory>,
    pub kind: NodeKind,
}

impl GraphNode {
    pub fn address(id: impl Into<String>) -> Self {
        GraphNode {
            id: id.into(),
            name: None,
            category: None,
            kind: NodeKind::Address,
        }
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }
}

/// One stored edge; multiplicity is folded into `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEdge {
    pub src: u32,
    pub dst: u32,
    pub weight: u64,
}

/// A directed, weighted, node-attributed graph.
///
/// Invariants: at most one edge per ordered `(src, dst)` pair, every weight
/// is at least 1, no self-edges in the edge list, and every endpoint is a
/// valid node index. Edges are kept sorted by `(src, dst)`.
#[derive(Debug, Clone, Default)]
pub struct EmailGraph {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    /// Weight folded away as within-group self-edges during aggregation,
    /// indexed like `nodes`. All zeros for non-aggregated graphs.
    intra_weight: Vec<u64>,
}

impl EmailGraph {
    /// Assemble a graph from parts; folds duplicate pairs, drops
    /// self-edges and zero weights, and sorts the edge list. Node ids
    /// must be unique.
    pub fn from_parts(nodes: Vec<GraphNode>, edges: Vec<GraphEdge>) -> Result<Self> {
        let mut ids: Vec<&str> = nodes.iter().map(|n| n.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate node id {:?}",
                dup[0]
            )));
        }
        let n = nodes.len() as u32;
        let mut folded: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for e in edges {
            if e.src >= n || e.dst >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) out of range for {} nodes",
                    e.src, e.dst, n
                )));
            }
            if e.src == e.dst || e.weight == 0 {
                continue;
            }
            *folded.entry((e.src, e.dst)).or_insert(0) += e.weight;
        }
        let edges = folded
            .into_iter()
            .map(|((src, dst), weight)| GraphEdge { src, dst, weight })
            .collect();
        let intra_weight = vec![0; nodes.len()];
        Ok(EmailGraph {
            nodes,
            edges,
            intra_weight,
        })
    }

    /// Construction fast path for generators that already guarantee the
    /// invariants (sorted unique pairs, no self-edges, weights >= 1).
    pub(crate) fn from_sorted_parts(nodes: Vec<GraphNode>, edges: Vec<GraphEdge>) -> Self {
        debug_assert!(edges
            .windows(2)
            .all(|w| (w[0].src, w[0].dst) < (w[1].src, w[1].dst)));
        debug_assert!(edges.iter().all(|e| e.src != e.dst
            && e.weight >= 1
            && (e.src as usize) < nodes.len()
            && (e.dst as usize) < nodes.len()));
        let intra_weight = vec![0; nodes.len()];
        EmailGraph {
            nodes,
            edges,
            intra_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn node(&self, idx: u32) -> &GraphNode {
        &self.nodes[idx as usize]
    }

    /// Linear scan; build a map with [`EmailGraph::index_map`] for bulk use.
    pub fn node_index(&self, id: &str) -> Option<u32> {
        self.nodes.iter().position(|n| n.id == id).map(|i| i as u32)
    }

    pub fn index_map(&self) -> HashMap<&str, u32> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i as u32))
            .collect()
    }

    /// Per-node weight of within-group traffic folded during aggregation.
    pub fn intra_weights(&self) -> &[u64] {
        &self.intra_weight
    }

    pub fn total_edge_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn total_intra_weight(&self) -> u64 {
        self.intra_weight.iter().sum()
    }

    /// Out-adjacency as `(neighbor, weight)` lists, in edge order.
    pub fn out_adjacency(&self) -> Vec<Vec<(u32, u64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.src as usize].push((e.dst, e.weight));
        }
        adj
    }

    /// Undirected projection: weights of the two directions are summed,
    /// each neighbor listed once, neighbors sorted.
    pub fn undirected_adjacency(&self) -> Vec<Vec<(u32, u64)>> {
        let mut folded: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for e in &self.edges {
            let key = (e.src.min(e.dst), e.src.max(e.dst));
            *folded.entry(key).or_insert(0) += e.weight;
        }
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for ((a, b), w) in folded {
            adj[a as usize].push((b, w));
            adj[b as usize].push((a, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Out-degree histogram; see [`DegreeMode`] for what "degree" counts.
    pub fn out_degree_distribution(&self, mode: DegreeMode) -> DegreeDistribution {
        let mut degrees = vec![0u64; self.nodes.len()];
        for e in &self.edges {
            degrees[e.src as usize] += match mode {
                DegreeMode::DistinctRecipients => 1,
                DegreeMode::TotalMessages => e.weight,
            };
        }
        let mut counts = BTreeMap::new();
        for &w in &degrees {
            if w >= 1 {
                *counts.entry(w).or_insert(0u64) += 1;
            }
        }
        DegreeDistribution {
            counts,
            total_nodes: self.nodes.len() as u64,
        }
    }
}

/// What the out-degree `w` counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMode {
    /// Number of distinct recipients (out-neighbor count). The default.
    #[default]
    DistinctRecipients,
    /// Total messages sent (sum of out-edge weights).
    TotalMessages,
}

/// Histogram `w -> n`: how many nodes have out-degree `w`.
///
/// Nodes with `w = 0` are excluded from the mapping but counted in
/// `total_nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub counts: BTreeMap<u64, u64>,
    pub total_nodes: u64,
}

impl DegreeDistribution {
    /// Number of nodes with out-degree >= 1.
    pub fn mass(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Serialize as CSV `w,n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,n\n");
        for (w, n) in &self.counts {
            out.push_str(&format!("{w},{n}\n"));
        }
        out
    }

    /// Parse the CSV produced by [`DegreeDistribution::to_csv`]. The CSV
    /// carries no zero-degree nodes, so `total_nodes` is the histogram
    /// mass.
    pub fn from_csv(reader: impl std::io::Read) -> Result<Self> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let mut counts = BTreeMap::new();
        for record in csv_reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<u64> {
                record
                    .get(i)
                    .unwrap_or("")
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad degree row: {record:?}")))
            };
            counts.insert(parse(0)?, parse(1)?);
        }
        let total_nodes = counts.values().sum();
        Ok(DegreeDistribution {
            counts,
            total_nodes,
        })
    }
}

/// Build the address-level graph: one node per distinct address, one edge
/// per (sender, recipient) pair with message multiplicity as weight.
/// Self-edges (sender = recipient) are dropped.
pub fn build_graph(records: &[EmailRecord]) -> EmailGraph {
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut intern = |nodes: &mut Vec<GraphNode>, id: String| -> u32 {
        if let Some(&i) = index.get(&id) {
            return i;
        }
        let i = nodes.len() as u32;
        index.insert(id.clone(), i);
        nodes.push(GraphNode::address(id));
        i
    };
    let mut weights: HashMap<(u32, u32), u64> = HashMap::new();
    for record in records {
        let src = intern(&mut nodes, record.sender.to_string());
        for recipient in &record.recipients {
            let dst = intern(&mut nodes, recipient.to_string());
            if src != dst {
                *weights.entry((src, dst)).or_insert(0) += 1;
            }
        }
    }
    let mut edges: Vec<GraphEdge> = weights
        .into_iter()
        .map(|((src, dst), weight)| GraphEdge { src, dst, weight })
        .collect();
    edges.sort_unstable_by_key(|e| (e.src, e.dst));
    let intra_weight = vec![0; nodes.len()];
    EmailGraph {
        nodes,
        edges,
        intra_weight,
    }
}

/// Identity and attributes of an aggregation group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRef {
    pub id: String,
    pub name: Option<String>,
    pub category: Option<UnitCategory>,
    pub kind: NodeKind,
}

impl GroupRef {
    pub fn unit(id: impl Into<String>) -> Self {
        GroupRef {
            id: id.into(),
            name: None,
            category: None,
            kind: NodeKind::Unit,
        }
    }
}

/// Reserved group for nodes the mapping does not cover.
pub const UNMAPPED_GROUP: &str = "unmapped";

/// Quotient graph under a node -> group mapping.
///
/// Edge weights are summed over mapped pairs. Within-group edges become
/// self-edges and are recorded per group in `intra_weights`, excluded from
/// the edge list, so total weight is conserved:
/// `sum(edges) + sum(intra) = sum(input edges)`.
pub fn aggregate_graph(
    graph: &EmailGraph,
    mut assign: impl FnMut(&GraphNode) -> Option<GroupRef>,
) -> EmailGraph {
    let mut group_index: HashMap<String, u32> = HashMap::new();
    let mut groups: Vec<GraphNode> = Vec::new();
    let mut node_group = Vec::with_capacity(graph.node_count());
    for node in &graph.nodes {
        let group = assign(node).unwrap_or_else(|| GroupRef {
            id: UNMAPPED_GROUP.to_string(),
            name: None,
            category: None,
            kind: NodeKind::Unit,
        });
        let idx = match group_index.get(&group.id) {
            Some(&i) => i,
            None => {
                let i = groups.len() as u32;
                group_index.insert(group.id.clone(), i);
                groups.push(GraphNode {
                    id: group.id,
                    name: group.name,
                    category: group.category,
                    kind: group.kind,
                });
                i
            }
        };
        node_group.push(idx);
    }
    let mut folded: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut intra_weight = vec![0u64; groups.len()];
    for e in &graph.edges {
        let src = node_group[e.src as usize];
        let dst = node_group[e.dst as usize];
        if src == dst {
            intra_weight[src as usize] += e.weight;
        } else {
            *folded.entry((src, dst)).or_insert(0) += e.weight;
        }
    }
    let edges = folded
        .into_iter()
        .map(|((src, dst), weight)| GraphEdge { src, dst, weight })
        .collect();
    EmailGraph {
        nodes: groups,
        edges,
        intra_weight,
    }
}
