//! Community detection against exhaustive references: planted partitions
//! recovered exactly, checkpoint modularities independently recomputed,
//! and the selected checkpoint maximal among all recorded ones.

use std::collections::BTreeMap;

use orgnet::community::{best_partition, girvan_newman, modularity, GnStop};
use orgnet::graph::{EmailGraph, GraphEdge, GraphNode};
use orgnet::oracles;

fn graph(n: usize, edges: &[(u32, u32)]) -> EmailGraph {
    let nodes = (0..n)
        .map(|i| GraphNode::address(format!("n{i:02}")))
        .collect();
    let edges = edges
        .iter()
        .map(|&(src, dst)| GraphEdge {
            src,
            dst,
            weight: 1,
        })
        .collect();
    EmailGraph::from_parts(nodes, edges).unwrap()
}

fn membership_of(graph: &EmailGraph, partition: &[Vec<String>]) -> Vec<usize> {
    let mut by_id = BTreeMap::new();
    for (c, group) in partition.iter().enumerate() {
        for id in group {
            by_id.insert(id.clone(), c);
        }
    }
    graph.nodes().iter().map(|n| by_id[&n.id]).collect()
}

#[test]
fn two_triangle_bridge_recovered() {
    let g = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]);
    let dendrogram = girvan_newman(&g, GnStop::Exhaust);
    let best = best_partition(&dendrogram).unwrap();
    assert_eq!(best.components, 2);
    assert_eq!(
        best.partition,
        vec![
            vec!["n00".to_string(), "n01".into(), "n02".into()],
            vec!["n03".to_string(), "n04".into(), "n05".into()],
        ]
    );
}

#[test]
fn three_blocks_recovered() {
    let mut edges = Vec::new();
    for block in 0..3u32 {
        let base = block * 6;
        for i in 0..6 {
            for j in (i + 1)..6 {
                edges.push((base + i, base + j));
            }
        }
    }
    edges.extend([(0, 6), (6, 12), (12, 0)]);
    let g = graph(18, &edges);
    let best_cp = best_partition(&girvan_newman(&g, GnStop::Exhaust))
        .unwrap()
        .clone();
    assert_eq!(best_cp.components, 3);
    for group in &best_cp.partition {
        assert_eq!(group.len(), 6);
        let blocks: std::collections::BTreeSet<u32> = group
            .iter()
            .map(|id| id[1..].parse::<u32>().unwrap() / 6)
            .collect();
        assert_eq!(blocks.len(), 1, "group spans blocks: {group:?}");
    }
}

#[test]
fn checkpoint_modularities_match_pairwise_oracle() {
    for k in 0..30u64 {
        let n = 4 + (k % 5) as usize; // 4..=8 nodes
        let g = oracles::random_graph(500 + k, n, 0.3 + 0.05 * (k % 6) as f64);
        if g.edge_count() == 0 {
            continue;
        }
        let dendrogram = girvan_newman(&g, GnStop::Exhaust);
        let mut checkpoint_max = f64::NEG_INFINITY;
        for checkpoint in &dendrogram.checkpoints {
            let membership = membership_of(&g, &checkpoint.partition);
            let reference = oracles::modularity(&g, &membership);
            assert!(
                (checkpoint.modularity - reference).abs() < 1e-12,
                "graph {k}: recorded {} vs pairwise {}",
                checkpoint.modularity,
                reference
            );
            let recomputed = modularity(&g, &checkpoint.partition).unwrap();
            assert!((checkpoint.modularity - recomputed).abs() < 1e-12);
            checkpoint_max = checkpoint_max.max(reference);
        }
        if let Ok(best) = best_partition(&dendrogram) {
            assert!(
                (best.modularity - checkpoint_max).abs() < 1e-12,
                "graph {k}: best {} vs checkpoint max {}",
                best.modularity,
                checkpoint_max
            );
        }
    }
}

#[test]
fn planted_partitions_attain_global_maximum() {
    // On the planted constructions the best checkpoint is also the global
    // modularity optimum over all partitions.
    let g = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]);
    let best = best_partition(&girvan_newman(&g, GnStop::Exhaust))
        .unwrap()
        .clone();
    let global = oracles::all_partitions(6)
        .iter()
        .map(|membership| oracles::modularity(&g, membership))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (best.modularity - global).abs() < 1e-12,
        "best checkpoint {} vs global {}",
        best.modularity,
        global
    );
}
