//! Deterministic graph layouts and visual encodings.
//!
//! The force layout assigns an inverse-square repulsion between every node
//! pair and a linear spring along each edge with stiffness proportional to
//! the edge weight, then relaxes to an equilibrium with damped synchronous
//! steps from seeded random initial positions. Exactness and determinism
//! are preferred over asymptotic speed; target graphs are at most a few
//! thousand nodes.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EmailGraph;
use crate::orgmap::UnitCategory;

/// Force-model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceParams {
    /// Repulsion constant: pairwise force magnitude `k_r / d^2`.
    pub repulsion: f64,
    /// Spring constant per unit edge weight.
    pub spring: f64,
    /// Spring rest length, in layout units.
    pub rest_length: f64,
    /// Damped step size.
    pub step: f64,
    /// Convergence threshold on the max per-node displacement.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ForceParams {
    fn default() -> Self {
        ForceParams {
            repulsion: 1.0,
            spring: 1.0,
            rest_length: 1.0,
            step: 0.05,
            tol: 1e-4,
            max_iter: 10_000,
        }
    }
}

impl ForceParams {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("repulsion", self.repulsion),
            ("spring", self.spring),
            ("rest_length", self.rest_length),
            ("step", self.step),
            ("tol", self.tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Node positions in abstract layout units, plus a convergence report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    /// `(x, y)` per node, indexed like `graph.nodes()`; centroid at the
    /// origin for force layouts.
    pub positions: Vec<(f64, f64)>,
    pub iterations: usize,
    /// Max per-node displacement of the final iteration.
    pub max_displacement: f64,
    pub converged: bool,
}

const MIN_SEPARATION: f64 = 1e-9;

/// Force-directed layout; deterministic for a given seed.
///
/// Coincident nodes are resolved by deterministic seeded jitter rather
/// than failing. Per-iteration displacement is capped at one rest length
/// per node, which keeps stiff hub nodes from diverging; the cap is
/// inactive near equilibrium, so converged positions still satisfy the
/// force balance. If `max_iter` is reached first, the result is returned
/// with `converged = false`.
pub fn force_layout(graph: &EmailGraph, params: &ForceParams, seed: u64) -> Result<LayoutResult> {
    params.validate()?;
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("empty graph".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let spread = (n as f64).sqrt() * params.rest_length;
    let mut positions: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.random_range(-spread..spread),
                rng.random_range(-spread..spread),
            )
        })
        .collect();
    let springs: Vec<(u32, u32, f64)> = graph
        .undirected_adjacency()
        .iter()
        .enumerate()
        .flat_map(|(i, neighbors)| {
            neighbors
                .iter()
                .filter(move |&&(j, _)| (i as u32) < j)
                .map(move |&(j, w)| (i as u32, j, w as f64))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut forces = vec![(0.0f64, 0.0f64); n];
    let mut iterations = 0;
    let mut max_displacement = f64::INFINITY;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        forces.fill((0.0, 0.0));
        // Pairwise repulsion.
        for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy, d) = separation(&mut positions, i, j, &mut rng);
                let magnitude = params.repulsion / (d * d);
                let (ux, uy) = (dx / d, dy / d);
                forces[i].0 -= magnitude * ux;
                forces[i].1 -= magnitude * uy;
                forces[j].0 += magnitude * ux;
                forces[j].1 += magnitude * uy;
            }
        }
        // Springs along edges.
        for &(i, j, weight) in &springs {
            let (i, j) = (i as usize, j as usize);
            let (dx, dy, d) = separation(&mut positions, i, j, &mut rng);
            let magnitude = params.spring * weight * (d - params.rest_length);
            let (ux, uy) = (dx / d, dy / d);
            forces[i].0 += magnitude * ux;
            forces[i].1 += magnitude * uy;
            forces[j].0 -= magnitude * ux;
            forces[j].1 -= magnitude * uy;
        }
        // Synchronous damped update, displacement capped per node.
        max_displacement = 0.0;
        for (position, force) in positions.iter_mut().zip(&forces) {
            let (mut sx, mut sy) = (params.step * force.0, params.step * force.1);
            let length = sx.hypot(sy);
            if length > params.rest_length {
                let scale = params.rest_length / length;
                sx *= scale;
                sy *= scale;
            }
            position.0 += sx;
            position.1 += sy;
            max_displacement = max_displacement.max(sx.hypot(sy));
        }
        if max_displacement < params.tol {
            converged = true;
            break;
        }
    }
    let cx = positions.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = positions.iter().map(|p| p.1).sum::<f64>() / n as f64;
    for p in &mut positions {
        p.0 -= cx;
        p.1 -= cy;
    }
    Ok(LayoutResult {
        positions,
        iterations,
        max_displacement,
        converged,
    })
}

/// Vector from `i` to `j` and its length, jittering node `j` when the two
/// coincide so forces stay finite.
fn separation(
    positions: &mut [(f64, f64)],
    i: usize,
    j: usize,
    rng: &mut ChaCha20Rng,
) -> (f64, f64, f64) {
    loop {
        let dx = positions[j].0 - positions[i].0;
        let dy = positions[j].1 - positions[i].1;
        let d = dx.hypot(dy);
        if d >= MIN_SEPARATION && d.is_finite() {
            return (dx, dy, d);
        }
        if !positions[j].0.is_finite() || !positions[j].1.is_finite() {
            positions[j] = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        } else {
            positions[j].0 += rng.random_range(-1e-3..1e-3);
            positions[j].1 += rng.random_range(-1e-3..1e-3);
        }
    }
}

/// Nodes equally spaced on the unit circle in the given order, starting
/// at angle 0.
pub fn circular_layout(graph: &EmailGraph, ordering: &[String]) -> Result<LayoutResult> {
    let n = graph.node_count();
    if ordering.len() != n {
        return Err(Error::InvalidArgument(format!(
            "ordering has {} entries for {} nodes",
            ordering.len(),
            n
        )));
    }
    let index = graph.index_map();
    let mut positions = vec![(f64::NAN, f64::NAN); n];
    let mut seen = vec![false; n];
    for (k, id) in ordering.iter().enumerate() {
        let &i = index
            .get(id.as_str())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown node {id:?} in ordering")))?;
        if seen[i as usize] {
            return Err(Error::InvalidArgument(format!(
                "node {id:?} appears twice in ordering"
            )));
        }
        seen[i as usize] = true;
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        positions[i as usize] = (angle.cos(), angle.sin());
    }
    Ok(LayoutResult {
        positions,
        iterations: 0,
        max_displacement: 0.0,
        converged: true,
    })
}

/// An 8-bit RGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    pub fn parse(hex: &str) -> Result<Rgb> {
        let hex = hex.trim_start_matches('#');
        if hex.len() != 6 {
            return Err(Error::InvalidArgument(format!("bad color {hex:?}")));
        }
        let byte = |range: std::ops::Range<usize>| {
            u8::from_str_radix(&hex[range], 16)
                .map_err(|_| Error::InvalidArgument(format!("bad color {hex:?}")))
        };
        Ok(Rgb(byte(0..2)?, byte(2..4)?, byte(4..6)?))
    }

    /// Per-channel integer mean (floor), used for edge colors.
    pub fn mix(&self, other: &Rgb) -> Rgb {
        Rgb(
            ((self.0 as u16 + other.0 as u16) / 2) as u8,
            ((self.1 as u16 + other.1 as u16) / 2) as u8,
            ((self.2 as u16 + other.2 as u16) / 2) as u8,
        )
    }
}

impl TryFrom<String> for Rgb {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Rgb::parse(&value)
    }
}

impl From<Rgb> for String {
    fn from(rgb: Rgb) -> String {
        rgb.hex()
    }
}

/// Which quantity drives node sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StyleScheme {
    /// Radius from the logarithm of a supplied centrality value.
    #[default]
    BetweennessLog,
    /// Radius from the logarithm of total degree (in plus out weight),
    /// computed from the graph itself.
    TotalDegree,
}

/// Sizing and palette knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StyleConfig {
    pub radius_min: f64,
    pub radius_max: f64,
    pub edge_width_min: f64,
    pub edge_width_max: f64,
    /// Category palette; unlisted categories fall back to `default_color`.
    pub palette: BTreeMap<UnitCategory, Rgb>,
    pub default_color: Rgb,
}

impl Default for StyleConfig {
    fn default() -> Self {
        StyleConfig {
            radius_min: 4.0,
            radius_max: 20.0,
            edge_width_min: 0.5,
            edge_width_max: 6.0,
            palette: default_palette(),
            default_color: Rgb(0x9e, 0x9e, 0x9e),
        }
    }
}

/// The documented default category palette.
pub fn default_palette() -> BTreeMap<UnitCategory, Rgb> {
    BTreeMap::from([
        (UnitCategory::TechnicalGroup, Rgb(0x1f, 0x77, 0xb4)),
        (UnitCategory::TechnicalProgram, Rgb(0x17, 0xbe, 0xcf)),
        (UnitCategory::TechnicalManagement, Rgb(0x94, 0x67, 0xbd)),
        (UnitCategory::OperationsGroup, Rgb(0xff, 0x7f, 0x0e)),
        (UnitCategory::OperationsProgram, Rgb(0xbc, 0xbd, 0x22)),
        (UnitCategory::OperationsManagement, Rgb(0xd6, 0x27, 0x28)),
        (UnitCategory::Administration, Rgb(0x2c, 0xa0, 0x2c)),
        (UnitCategory::Other, Rgb(0x7f, 0x7f, 0x7f)),
    ])
}

/// Visual encodings per node and edge, indexed like the graph's node and
/// edge lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualAttributes {
    pub node_radius: Vec<f64>,
    pub node_color: Vec<Rgb>,
    pub edge_width: Vec<f64>,
    pub edge_color: Vec<Rgb>,
}

/// Compute visual encodings.
///
/// Radii scale as `log(1 + value)` rescaled into `[radius_min,
/// radius_max]` anchored at value 0, so a zero value always maps to the
/// minimum radius and the mapping is monotone. Edge widths do the same
/// with `log(1 + weight)`; edge colors are the per-channel mean of the
/// endpoint colors; node colors come from the category palette.
pub fn style(
    graph: &EmailGraph,
    scheme: StyleScheme,
    values: &BTreeMap<String, f64>,
    config: &StyleConfig,
) -> Result<VisualAttributes> {
    let node_values: Vec<f64> = match scheme {
        StyleScheme::BetweennessLog => graph
            .nodes()
            .iter()
            .map(|node| {
                values
                    .get(&node.id)
                    .copied()
                    .ok_or_else(|| Error::MissingStyleValue(node.id.clone()))
            })
            .collect::<Result<_>>()?,
        StyleScheme::TotalDegree => {
            let mut totals = vec![0.0; graph.node_count()];
            for e in graph.edges() {
                totals[e.src as usize] += e.weight as f64;
                totals[e.dst as usize] += e.weight as f64;
            }
            totals
        }
    };
    for (node, &v) in graph.nodes().iter().zip(&node_values) {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::MissingStyleValue(node.id.clone()));
        }
    }
    let node_radius = log_scale(&node_values, config.radius_min, config.radius_max);
    let node_color: Vec<Rgb> = graph
        .nodes()
        .iter()
        .map(|node| {
            node.category
                .and_then(|c| config.palette.get(&c).copied())
                .unwrap_or(config.default_color)
        })
        .collect();
    let edge_values: Vec<f64> = graph.edges().iter().map(|e| e.weight as f64).collect();
    let edge_width = log_scale(&edge_values, config.edge_width_min, config.edge_width_max);
    let edge_color = graph
        .edges()
        .iter()
        .map(|e| node_color[e.src as usize].mix(&node_color[e.dst as usize]))
        .collect();
    Ok(VisualAttributes {
        node_radius,
        node_color,
        edge_width,
        edge_color,
    })
}

/// `log1p` values affinely rescaled into `[lo, hi]`, anchored at 0.
fn log_scale(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let max = values.iter().fold(0.0f64, |acc, &v| acc.max(v)).ln_1p();
    values
        .iter()
        .map(|&v| {
            if max == 0.0 {
                lo
            } else {
                lo + (hi - lo) * v.ln_1p() / max
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphEdge, GraphNode};

    fn graph(n: usize, edges: &[(u32, u32, u64)]) -> EmailGraph {
        let nodes = (0..n)
            .map(|i| GraphNode::address(format!("n{i}")))
            .collect();
        let edges = edges
            .iter()
            .map(|&(src, dst, weight)| GraphEdge { src, dst, weight })
            .collect();
        EmailGraph::from_parts(nodes, edges).unwrap()
    }

    /// Equilibrium separation of the 2-node spring/repulsion system by
    /// bisection on `k_s w (d - L) - k_r / d^2`.
    fn two_node_equilibrium(params: &ForceParams, weight: f64) -> f64 {
        let f =
            |d: f64| params.spring * weight * (d - params.rest_length) - params.repulsion / (d * d);
        let (mut lo, mut hi) = (params.rest_length, params.rest_length + 100.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn tight() -> ForceParams {
        ForceParams {
            tol: 1e-10,
            max_iter: 200_000,
            ..ForceParams::default()
        }
    }

    #[test]
    fn two_node_separation_matches_root_finder() {
        let g = graph(2, &[(0, 1, 1)]);
        let params = tight();
        let layout = force_layout(&g, &params, 11).unwrap();
        assert!(layout.converged);
        let (a, b) = (layout.positions[0], layout.positions[1]);
        let d = (a.0 - b.0).hypot(a.1 - b.1);
        let expected = two_node_equilibrium(&params, 1.0);
        assert!((d - expected).abs() < 1e-6, "d = {d}, expected {expected}");
    }

    #[test]
    fn triangle_is_equilateral() {
        let g = graph(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        let layout = force_layout(&g, &tight(), 3).unwrap();
        assert!(layout.converged);
        let p = &layout.positions;
        let d = |i: usize, j: usize| (p[i].0 - p[j].0).hypot(p[i].1 - p[j].1);
        let sides = [d(0, 1), d(1, 2), d(2, 0)];
        assert!((sides[0] - sides[1]).abs() < 1e-6, "{sides:?}");
        assert!((sides[1] - sides[2]).abs() < 1e-6, "{sides:?}");
    }

    #[test]
    fn layout_is_seed_deterministic() {
        let g = graph(5, &[(0, 1, 2), (1, 2, 1), (2, 3, 3), (3, 4, 1), (4, 0, 1)]);
        let a = force_layout(&g, &ForceParams::default(), 7).unwrap();
        let b = force_layout(&g, &ForceParams::default(), 7).unwrap();
        assert_eq!(a.positions, b.positions);
    }

    #[test]
    fn layout_centroid_at_origin() {
        let g = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let layout = force_layout(&g, &ForceParams::default(), 5).unwrap();
        let cx: f64 = layout.positions.iter().map(|p| p.0).sum();
        let cy: f64 = layout.positions.iter().map(|p| p.1).sum();
        assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9);
    }

    #[test]
    fn residual_force_bounded_at_convergence() {
        let g = graph(2, &[(0, 1, 1)]);
        let params = tight();
        let layout = force_layout(&g, &params, 2).unwrap();
        assert!(layout.converged);
        assert!(layout.max_displacement < params.tol);
        // Displacement = step * force, so force < tol / step.
        let (a, b) = (layout.positions[0], layout.positions[1]);
        let d = (a.0 - b.0).hypot(a.1 - b.1);
        let residual =
            (params.spring * (d - params.rest_length) - params.repulsion / (d * d)).abs();
        assert!(residual < params.tol / params.step);
    }

    #[test]
    fn separated_nodes_never_coincide() {
        let g = graph(6, &[(0, 1, 1), (2, 3, 1), (4, 5, 1)]);
        let layout = force_layout(&g, &ForceParams::default(), 1).unwrap();
        for i in 0..6 {
            for j in (i + 1)..6 {
                let (a, b) = (layout.positions[i], layout.positions[j]);
                assert!((a.0 - b.0).hypot(a.1 - b.1) > MIN_SEPARATION);
            }
        }
    }

    #[test]
    fn circular_four_nodes() {
        let g = graph(4, &[(0, 1, 1)]);
        let ordering: Vec<String> = (0..4).map(|i| format!("n{i}")).collect();
        let layout = circular_layout(&g, &ordering).unwrap();
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (got, want) in layout.positions.iter().zip(expected) {
            assert!((got.0 - want.0).abs() < 1e-12);
            assert!((got.1 - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn circular_single_node() {
        let g = graph(1, &[]);
        let layout = circular_layout(&g, &["n0".to_string()]).unwrap();
        assert_eq!(layout.positions, vec![(1.0, 0.0)]);
    }

    #[test]
    fn circular_seven_gaps() {
        let g = graph(7, &[]);
        let ordering: Vec<String> = (0..7).map(|i| format!("n{i}")).collect();
        let layout = circular_layout(&g, &ordering).unwrap();
        let gap = 2.0 * std::f64::consts::PI / 7.0;
        for k in 0..7 {
            let p = layout.positions[k];
            let angle = p.1.atan2(p.0).rem_euclid(2.0 * std::f64::consts::PI);
            assert!((angle - gap * k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn circular_rejects_non_permutation() {
        let g = graph(2, &[(0, 1, 1)]);
        assert!(circular_layout(&g, &["n0".to_string()]).is_err());
        assert!(circular_layout(&g, &["n0".to_string(), "n0".into()]).is_err());
        assert!(circular_layout(&g, &["n0".to_string(), "zz".into()]).is_err());
    }

    #[test]
    fn equal_values_equal_radii() {
        let g = graph(2, &[(0, 1, 1)]);
        let values = BTreeMap::from([("n0".to_string(), 3.5), ("n1".to_string(), 3.5)]);
        let attrs = style(
            &g,
            StyleScheme::BetweennessLog,
            &values,
            &StyleConfig::default(),
        )
        .unwrap();
        assert_eq!(attrs.node_radius[0], attrs.node_radius[1]);
    }

    #[test]
    fn zero_value_gets_min_radius() {
        let g = graph(2, &[(0, 1, 1)]);
        let values = BTreeMap::from([("n0".to_string(), 0.0), ("n1".to_string(), 9.0)]);
        let config = StyleConfig::default();
        let attrs = style(&g, StyleScheme::BetweennessLog, &values, &config).unwrap();
        assert_eq!(attrs.node_radius[0], config.radius_min);
        assert_eq!(attrs.node_radius[1], config.radius_max);
    }

    #[test]
    fn style_is_monotone() {
        let g = graph(3, &[]);
        let values = BTreeMap::from([
            ("n0".to_string(), 1.0),
            ("n1".to_string(), 5.0),
            ("n2".to_string(), 25.0),
        ]);
        let attrs = style(
            &g,
            StyleScheme::BetweennessLog,
            &values,
            &StyleConfig::default(),
        )
        .unwrap();
        assert!(attrs.node_radius[0] < attrs.node_radius[1]);
        assert!(attrs.node_radius[1] < attrs.node_radius[2]);
    }

    #[test]
    fn missing_value_names_node() {
        let g = graph(2, &[(0, 1, 1)]);
        let values = BTreeMap::from([("n0".to_string(), 1.0)]);
        match style(
            &g,
            StyleScheme::BetweennessLog,
            &values,
            &StyleConfig::default(),
        ) {
            Err(Error::MissingStyleValue(id)) => assert_eq!(id, "n1"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn edge_color_is_channel_mean() {
        assert_eq!(Rgb(255, 0, 0).mix(&Rgb(0, 0, 255)), Rgb(127, 0, 127));
    }

    #[test]
    fn rgb_hex_round_trip() {
        let color = Rgb(0x1f, 0x77, 0xb4);
        assert_eq!(Rgb::parse(&color.hex()).unwrap(), color);
    }
}
