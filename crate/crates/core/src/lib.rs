//! Analysis toolkit for organizational email networks.
//!
//! The pieces, in pipeline order:
//!
//! - [`ingest`]: parse email logs into normalized records and clean out
//!   automated traffic.
//! - [`orgmap`]: load org charts and the address directory, resolve
//!   addresses to units at any hierarchy level.
//! - [`graph`]: build and aggregate directed weighted email graphs;
//!   degree distributions, betweenness centrality, external-domain
//!   tallies.
//! - [`community`]: divisive (edge-betweenness) community detection with
//!   modularity-based selection.
//! - [`layout`] / [`export`]: deterministic force-directed and circular
//!   layouts, visual encodings, SVG/DOT/GraphML output.
//! - [`hiermodel`]: the hierarchical broadcast model — exact synthetic
//!   generation, power-law tail fitting, and inverse inference of
//!   organizational parameters.
//! - [`temporal`]: per-bin traffic series and weekday profiles.

pub mod community;
pub mod error;
pub mod export;
pub mod graph;
pub mod hiermodel;
pub mod ingest;
pub mod layout;
#[cfg(feature = "oracles")]
pub mod oracles;
pub mod orgmap;
pub mod temporal;

pub use community::{best_partition, girvan_newman, modularity, Checkpoint, Dendrogram, GnStop};
pub use error::{Error, Result};
pub use export::{render, RenderFormat};
pub use graph::{
    aggregate_graph, betweenness_centrality, build_graph, external_domain_tally,
    BetweennessOptions, CommTally, DegreeDistribution, DegreeMode, Direction, EmailGraph,
    GraphEdge, GraphNode, GroupRef, NodeKind, TldConfig, Weighting,
};
pub use hiermodel::{
    fit_power_law, fit_power_law_with, generate_broadcast_network, infer_structure,
    predicted_count, predicted_exponent, FitOptions, HierarchyParams, InferenceReport, NoiseParams,
    PowerLawFit,
};
pub use ingest::{
    clean_records, parse_email_log, restrict_to_domain, Address, CleaningPolicy, EmailRecord,
    LogFormat, ParsedLog,
};
pub use layout::{
    circular_layout, force_layout, style, ForceParams, LayoutResult, Rgb, StyleConfig, StyleScheme,
    VisualAttributes,
};
pub use orgmap::{AddressDirectory, OrgChart, OrgUnit, Resolution, UnitCategory};
pub use temporal::{emails_per_bin, senders_per_bin, weekday_profile, TimeSeries, WeekdayProfile};
