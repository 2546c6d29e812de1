//! Graph serialization: SVG, DOT, GraphML, and CSV edge lists.
//!
//! Every writer is a pure function of its inputs and iterates nodes and
//! edges in stored order, so output bytes are stable across runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EmailGraph;
use crate::layout::{LayoutResult, VisualAttributes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Svg,
    Dot,
    GraphMl,
}

impl RenderFormat {
    pub fn parse(name: &str) -> Result<RenderFormat> {
        match name.to_lowercase().as_str() {
            "svg" => Ok(RenderFormat::Svg),
            "dot" => Ok(RenderFormat::Dot),
            "graphml" => Ok(RenderFormat::GraphMl),
            other => Err(Error::InvalidArgument(format!(
                "unknown render format {other:?} (svg, dot, graphml)"
            ))),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            RenderFormat::Svg => "svg",
            RenderFormat::Dot => "dot",
            RenderFormat::GraphMl => "graphml",
        }
    }
}

/// Render a laid-out, styled graph as a self-contained document.
pub fn render(
    graph: &EmailGraph,
    layout: &LayoutResult,
    attributes: &VisualAttributes,
    format: RenderFormat,
) -> Result<String> {
    if layout.positions.len() != graph.node_count()
        || attributes.node_radius.len() != graph.node_count()
        || attributes.edge_width.len() != graph.edge_count()
    {
        return Err(Error::InvalidArgument(
            "layout/attributes do not cover the graph".into(),
        ));
    }
    Ok(match format {
        RenderFormat::Svg => svg(graph, layout, attributes),
        RenderFormat::Dot => dot(graph, Some((layout, attributes)), &[]),
        RenderFormat::GraphMl => graphml(graph, Some((layout, attributes)), &[]),
    })
}

/// Pixels per layout unit in SVG output.
const SVG_SCALE: f64 = 100.0;
const SVG_MARGIN: f64 = 30.0;

fn svg(graph: &EmailGraph, layout: &LayoutResult, attributes: &VisualAttributes) -> String {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for &(x, y) in &layout.positions {
        min_x = min_x.min(x * SVG_SCALE);
        min_y = min_y.min(y * SVG_SCALE);
        max_x = max_x.max(x * SVG_SCALE);
        max_y = max_y.max(y * SVG_SCALE);
    }
    if graph.node_count() == 0 {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 0.0, 0.0);
    }
    let pad = SVG_MARGIN
        + attributes
            .node_radius
            .iter()
            .fold(0.0f64, |acc, &r| acc.max(r));
    let (view_x, view_y) = (min_x - pad, min_y - pad);
    let (view_w, view_h) = (max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"{view_x:.3} {view_y:.3} {view_w:.3} {view_h:.3}\">\n"
    ));
    // Edges first so nodes draw on top.
    for (e, (&width, color)) in graph
        .edges()
        .iter()
        .zip(attributes.edge_width.iter().zip(&attributes.edge_color))
    {
        let (x1, y1) = layout.positions[e.src as usize];
        let (x2, y2) = layout.positions[e.dst as usize];
        out.push_str(&format!(
            "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" \
             stroke=\"{}\" stroke-width=\"{:.3}\" stroke-opacity=\"0.7\"/>\n",
            x1 * SVG_SCALE,
            y1 * SVG_SCALE,
            x2 * SVG_SCALE,
            y2 * SVG_SCALE,
            color.hex(),
            width,
        ));
    }
    for (i, (&(x, y), (&radius, color))) in layout
        .positions
        .iter()
        .zip(attributes.node_radius.iter().zip(&attributes.node_color))
        .enumerate()
    {
        out.push_str(&format!(
            "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"{}\">\
             <title>{}</title></circle>\n",
            x * SVG_SCALE,
            y * SVG_SCALE,
            radius,
            color.hex(),
            xml_escape(graph.node(i as u32).label()),
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Extra per-node numeric attributes for DOT/GraphML exports,
/// e.g. `[("betweenness", scores)]`.
pub type NodeScores<'a> = [(&'a str, &'a [f64])];

/// DOT digraph with node attributes (category, optional position/style,
/// any extra scores) and edge weights.
pub fn dot(
    graph: &EmailGraph,
    style: Option<(&LayoutResult, &VisualAttributes)>,
    scores: &NodeScores<'_>,
) -> String {
    let mut out = String::from("digraph email {\n");
    for (i, node) in graph.nodes().iter().enumerate() {
        let mut attrs = vec![format!("label=\"{}\"", dot_escape(node.label()))];
        if let Some(category) = node.category {
            attrs.push(format!("category=\"{category}\""));
        }
        for (name, values) in scores {
            attrs.push(format!("{name}=\"{:.6}\"", values[i]));
        }
        if let Some((layout, vis)) = style {
            let (x, y) = layout.positions[i];
            attrs.push(format!("pos=\"{x:.4},{y:.4}!\""));
            attrs.push(format!("width=\"{:.4}\"", vis.node_radius[i] / 36.0));
            attrs.push("style=\"filled\"".to_string());
            attrs.push(format!("fillcolor=\"{}\"", vis.node_color[i].hex()));
        }
        out.push_str(&format!(
            "  \"{}\" [{}];\n",
            dot_escape(&node.id),
            attrs.join(", ")
        ));
    }
    for (k, e) in graph.edges().iter().enumerate() {
        let mut attrs = vec![format!("weight={}", e.weight)];
        if let Some((_, vis)) = style {
            attrs.push(format!("penwidth=\"{:.3}\"", vis.edge_width[k]));
            attrs.push(format!("color=\"{}\"", vis.edge_color[k].hex()));
        }
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [{}];\n",
            dot_escape(&graph.node(e.src).id),
            dot_escape(&graph.node(e.dst).id),
            attrs.join(", ")
        ));
    }
    out.push_str("}\n");
    out
}

/// GraphML with node attributes (name, category, optional position/style,
/// any extra scores) and the edge weight attribute.
pub fn graphml(
    graph: &EmailGraph,
    style: Option<(&LayoutResult, &VisualAttributes)>,
    scores: &NodeScores<'_>,
) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
    );
    let mut keys: Vec<(&str, &str)> = vec![
        ("name", "string"),
        ("category", "string"),
        ("kind", "string"),
    ];
    for (name, _) in scores {
        keys.push((name, "double"));
    }
    if style.is_some() {
        keys.extend([
            ("x", "double"),
            ("y", "double"),
            ("r", "double"),
            ("color", "string"),
        ]);
    }
    for (name, ty) in &keys {
        out.push_str(&format!(
            "  <key id=\"{name}\" for=\"node\" attr.name=\"{name}\" attr.type=\"{ty}\"/>\n"
        ));
    }
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <graph id=\"email\" edgedefault=\"directed\">\n");
    for (i, node) in graph.nodes().iter().enumerate() {
        out.push_str(&format!("    <node id=\"{}\">\n", xml_escape(&node.id)));
        out.push_str(&format!(
            "      <data key=\"name\">{}</data>\n",
            xml_escape(node.label())
        ));
        if let Some(category) = node.category {
            out.push_str(&format!("      <data key=\"category\">{category}</data>\n"));
        }
        out.push_str(&format!(
            "      <data key=\"kind\">{}</data>\n",
            serde_json::to_value(node.kind)
                .expect("plain enum")
                .as_str()
                .expect("string variant")
        ));
        for (name, values) in scores {
            out.push_str(&format!(
                "      <data key=\"{name}\">{:.6}</data>\n",
                values[i]
            ));
        }
        if let Some((layout, vis)) = style {
            let (x, y) = layout.positions[i];
            out.push_str(&format!("      <data key=\"x\">{x:.6}</data>\n"));
            out.push_str(&format!("      <data key=\"y\">{y:.6}</data>\n"));
            out.push_str(&format!(
                "      <data key=\"r\">{:.4}</data>\n",
                vis.node_radius[i]
            ));
            out.push_str(&format!(
                "      <data key=\"color\">{}</data>\n",
                vis.node_color[i].hex()
            ));
        }
        out.push_str("    </node>\n");
    }
    for e in graph.edges() {
        out.push_str(&format!(
            "    <edge source=\"{}\" target=\"{}\">\
             <data key=\"weight\">{}</data></edge>\n",
            xml_escape(&graph.node(e.src).id),
            xml_escape(&graph.node(e.dst).id),
            e.weight
        ));
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// CSV edge list `src,dst,weight`.
pub fn edge_list_csv(graph: &EmailGraph) -> String {
    let mut out = String::from("src,dst,weight\n");
    for e in graph.edges() {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_escape(&graph.node(e.src).id),
            csv_escape(&graph.node(e.dst).id),
            e.weight
        ));
    }
    out
}

/// CSV of per-node scores, e.g. betweenness: `node_id,score`.
pub fn node_scores_csv(graph: &EmailGraph, header: &str, scores: &[f64]) -> String {
    let mut out = format!("node_id,{header}\n");
    for (node, score) in graph.nodes().iter().zip(scores) {
        out.push_str(&format!("{},{score:.9}\n", csv_escape(&node.id)));
    }
    out
}

/// Partition CSV `node_id,community_id`, communities numbered in order.
pub fn partition_csv(partition: &[Vec<String>]) -> String {
    let mut rows = BTreeMap::new();
    for (c, group) in partition.iter().enumerate() {
        for id in group {
            rows.insert(id.clone(), c);
        }
    }
    let mut out = String::from("node_id,community_id\n");
    for (id, c) in rows {
        out.push_str(&format!("{},{c}\n", csv_escape(&id)));
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
