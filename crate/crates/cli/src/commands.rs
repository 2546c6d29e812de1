//! Subcommand implementations. Every command writes its artifacts plus a
//! run manifest into the output directory.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use orgnet::community::{best_partition, girvan_newman, GnStop};
use orgnet::export;
use orgnet::graph::{
    aggregate_graph, betweenness_centrality, build_graph, external_domain_tally,
    BetweennessOptions, DegreeMode, Direction, EmailGraph, GroupRef, NodeKind, Weighting,
};
use orgnet::hiermodel::{
    fit_power_law_with, generate_broadcast_network, infer_structure, to_email_records, FitOptions,
    HierarchyParams, NoiseParams, PowerLawFit,
};
use orgnet::ingest::{
    clean_records, parse_email_log, restrict_to_domain, write_email_log_csv, EmailRecord,
    LogFormat, ParsedLog,
};
use orgnet::layout::{circular_layout, force_layout, style, StyleScheme};
use orgnet::orgmap::{AddressDirectory, DirectoryLoad, OrgChart, Resolution, UnitCategory};
use orgnet::{Address, DegreeDistribution};

use crate::config::{LayoutAlgorithm, PipelineConfig};
use crate::manifest::Workspace;
use crate::{
    AggregateArgs, CliError, CommunitiesArgs, DegreeArgs, FitArgs, InferArgs, IoArgs, LayoutArgs,
    SimulateArgs, StatsArgs, TemporalArgs,
};

pub struct Ctx {
    pub config: PipelineConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
}

#[derive(Serialize)]
struct IngestReport {
    parsed: usize,
    malformed: usize,
    first_malformed: Option<orgnet::ingest::MalformedLine>,
    dropped_bounce: usize,
    records_clean: usize,
    records_internal: Option<usize>,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

impl Ctx {
    fn log_path(&self, io: &IoArgs) -> Result<PathBuf, CliError> {
        io.log
            .clone()
            .or_else(|| self.config.log.clone())
            .ok_or_else(|| usage("no email log: pass --log or set \"log\" in the config"))
    }

    fn log_format(&self, io: &IoArgs) -> Result<LogFormat, CliError> {
        match &io.format {
            Some(name) => Ok(LogFormat::parse(name)?),
            None => Ok(self.config.log_format),
        }
    }

    fn internal_suffix(&self, io: &IoArgs) -> Option<String> {
        io.internal_suffix
            .clone()
            .or_else(|| self.config.cleaning.internal_domain_suffix.clone())
            .filter(|s| !s.is_empty())
    }
}

/// Parse, clean, and (when a suffix is configured) restrict a log.
/// Returns cleaned records, internal records, and the report.
fn load_records(
    ctx: &Ctx,
    io: &IoArgs,
    ws: &mut Workspace,
) -> Result<(Vec<EmailRecord>, Vec<EmailRecord>, IngestReport), CliError> {
    let path = ctx.log_path(io)?;
    let format = ctx.log_format(io)?;
    let bytes = ws.note_input(&path)?;
    let ParsedLog {
        records,
        malformed,
        first_malformed,
    } = parse_email_log(bytes.as_slice(), format)?;
    let parsed = records.len();
    let cleaned = clean_records(records, &ctx.config.cleaning);
    let dropped_bounce = parsed - cleaned.len();
    let (internal, internal_count) = match ctx.internal_suffix(io) {
        Some(suffix) => {
            let restricted = restrict_to_domain(cleaned.clone(), &suffix);
            let count = restricted.len();
            (restricted, Some(count))
        }
        None => (cleaned.clone(), None),
    };
    let report = IngestReport {
        parsed,
        malformed,
        first_malformed,
        dropped_bounce,
        records_clean: cleaned.len(),
        records_internal: internal_count,
    };
    Ok((cleaned, internal, report))
}

fn load_chart(ctx: &Ctx, args: &AggregateArgs, ws: &mut Workspace) -> Result<OrgChart, CliError> {
    let path = args
        .chart
        .clone()
        .or_else(|| ctx.config.org_chart.clone())
        .ok_or_else(|| usage("no org chart: pass --chart or set \"org_chart\" in the config"))?;
    let bytes = ws.note_input(&path)?;
    Ok(OrgChart::from_reader(bytes.as_slice())?)
}

fn load_directory(
    ctx: &Ctx,
    args: &AggregateArgs,
    chart: &OrgChart,
    ws: &mut Workspace,
) -> Result<DirectoryLoad, CliError> {
    let path = args
        .directory
        .clone()
        .or_else(|| ctx.config.directory.clone())
        .ok_or_else(|| {
            usage("no address directory: pass --directory or set \"directory\" in the config")
        })?;
    let bytes = ws.note_input(&path)?;
    let suffix = ctx.internal_suffix(&args.io).unwrap_or_default();
    Ok(AddressDirectory::from_reader(
        bytes.as_slice(),
        chart,
        suffix,
    )?)
}

/// Honor `keep_non_person_domains = false`: drop records sent by internal
/// addresses that the directory cannot attribute to a person's unit.
fn apply_non_person_policy(
    ctx: &Ctx,
    records: Vec<EmailRecord>,
    directory: &AddressDirectory,
) -> Vec<EmailRecord> {
    if ctx.config.cleaning.keep_non_person_domains {
        return records;
    }
    records
        .into_iter()
        .filter(|r| !matches!(directory.resolve(&r.sender), Resolution::UnknownInternal))
        .collect()
}

/// Aggregation target for one address node.
fn group_for(
    address: &Address,
    chart: &OrgChart,
    directory: &AddressDirectory,
    by_category: bool,
    level: Option<u32>,
) -> GroupRef {
    match directory.resolve(address) {
        Resolution::Unit(unit_id) => {
            let unit = chart
                .get(unit_id)
                .expect("directory validated against chart");
            if by_category {
                let category = unit.category;
                GroupRef {
                    id: category.name().to_string(),
                    name: None,
                    category: Some(category),
                    kind: NodeKind::Category,
                }
            } else {
                let target = match level {
                    Some(target) if unit.level > target => chart
                        .lift_to_level(unit_id, target)
                        .expect("target below unit level"),
                    _ => unit,
                };
                GroupRef {
                    id: target.unit_id.clone(),
                    name: Some(target.name.clone()),
                    category: Some(target.category),
                    kind: NodeKind::Unit,
                }
            }
        }
        Resolution::UnknownInternal => {
            if by_category {
                GroupRef {
                    id: "uncategorized".to_string(),
                    name: None,
                    category: None,
                    kind: NodeKind::Category,
                }
            } else {
                GroupRef {
                    id: orgnet::orgmap::unknown_internal_unit(address.domain()),
                    name: None,
                    category: None,
                    kind: NodeKind::Unit,
                }
            }
        }
        Resolution::External => GroupRef {
            id: "external".to_string(),
            name: None,
            category: None,
            kind: NodeKind::External,
        },
    }
}

fn unit_graph(
    ctx: &Ctx,
    args: &AggregateArgs,
    records: &[EmailRecord],
    chart: &OrgChart,
    directory: &AddressDirectory,
) -> EmailGraph {
    let by_category = args.by_category || ctx.config.aggregation.by_category;
    let level = args.level.or(ctx.config.aggregation.level);
    let address_graph = build_graph(records);
    aggregate_graph(&address_graph, |node| {
        let address = Address::parse(&node.id).ok()?;
        Some(group_for(&address, chart, directory, by_category, level))
    })
}

pub fn ingest(ctx: &Ctx, args: &IoArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let (cleaned, internal, report) = load_records(ctx, args, &mut ws)?;
    let mut csv = Vec::new();
    write_email_log_csv(&cleaned, &mut csv)?;
    ws.write("records_clean.csv", csv)?;
    if report.records_internal.is_some() {
        let mut csv = Vec::new();
        write_email_log_csv(&internal, &mut csv)?;
        ws.write("records_internal.csv", csv)?;
    }
    ws.write_json("ingest_report.json", &report)?;
    let effective = json!({
        "command": "ingest",
        "cleaning": ctx.config.cleaning,
        "format": ctx.log_format(args)?,
    });
    ws.finish("ingest", ctx.seed, effective)
}

pub fn aggregate(ctx: &Ctx, args: &AggregateArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let (_, internal, _) = load_records(ctx, &args.io, &mut ws)?;
    let chart = load_chart(ctx, args, &mut ws)?;
    let load = load_directory(ctx, args, &chart, &mut ws)?;
    let records = apply_non_person_policy(ctx, internal, &load.directory);
    let graph = unit_graph(ctx, args, &records, &chart, &load.directory);
    write_graph_artifacts(&mut ws, &graph, "unit")?;
    ws.write_json(
        "aggregate_report.json",
        &json!({
            "units": graph.node_count(),
            "edges": graph.edge_count(),
            "edge_weight": graph.total_edge_weight(),
            "intra_group_weight": graph.total_intra_weight(),
            "directory_unresolved": load.unresolved.len(),
            "directory_duplicates": load.duplicates.len(),
        }),
    )?;
    let effective = json!({
        "command": "aggregate",
        "by_category": args.by_category || ctx.config.aggregation.by_category,
        "level": args.level.or(ctx.config.aggregation.level),
    });
    ws.finish("aggregate", ctx.seed, effective)
}

fn write_graph_artifacts(
    ws: &mut Workspace,
    graph: &EmailGraph,
    stem: &str,
) -> Result<(), CliError> {
    let betweenness = betweenness_centrality(graph, &BetweennessOptions::default());
    let mut degree = vec![0.0; graph.node_count()];
    for e in graph.edges() {
        degree[e.src as usize] += e.weight as f64;
        degree[e.dst as usize] += e.weight as f64;
    }
    let scores: [(&str, &[f64]); 2] = [("betweenness", &betweenness), ("degree", &degree)];
    ws.write(&format!("{stem}_edges.csv"), export::edge_list_csv(graph))?;
    ws.write(
        &format!("{stem}_graph.graphml"),
        export::graphml(graph, None, &scores),
    )?;
    ws.write(
        &format!("{stem}_graph.dot"),
        export::dot(graph, None, &scores),
    )?;
    Ok(())
}

pub fn stats(ctx: &Ctx, args: &StatsArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let graph = graph_for(ctx, &args.aggregate, &mut ws)?;
    let options = BetweennessOptions {
        direction: if args.directed {
            Direction::Directed
        } else {
            Direction::Undirected
        },
        weighting: if args.inverse_weight {
            Weighting::InverseWeight
        } else {
            Weighting::Unweighted
        },
    };
    let scores = betweenness_centrality(&graph, &options);
    ws.write(
        "betweenness.csv",
        export::node_scores_csv(&graph, "betweenness", &scores),
    )?;
    ws.write("node_degrees.csv", degrees_csv(&graph))?;
    let effective = json!({
        "command": "stats",
        "direction": options.direction,
        "weighting": options.weighting,
    });
    ws.finish("stats", ctx.seed, effective)
}

fn degrees_csv(graph: &EmailGraph) -> String {
    let mut out_distinct = vec![0u64; graph.node_count()];
    let mut in_distinct = vec![0u64; graph.node_count()];
    let mut out_messages = vec![0u64; graph.node_count()];
    let mut in_messages = vec![0u64; graph.node_count()];
    for e in graph.edges() {
        out_distinct[e.src as usize] += 1;
        in_distinct[e.dst as usize] += 1;
        out_messages[e.src as usize] += e.weight;
        in_messages[e.dst as usize] += e.weight;
    }
    let mut csv = String::from("node_id,out_distinct,in_distinct,out_messages,in_messages\n");
    for (i, node) in graph.nodes().iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            node.id, out_distinct[i], in_distinct[i], out_messages[i], in_messages[i]
        ));
    }
    csv
}

/// Unit graph when chart and directory are resolvable, address graph
/// otherwise.
fn graph_for(ctx: &Ctx, args: &AggregateArgs, ws: &mut Workspace) -> Result<EmailGraph, CliError> {
    let (_, internal, _) = load_records(ctx, &args.io, ws)?;
    let have_chart = args.chart.is_some() || ctx.config.org_chart.is_some();
    let have_directory = args.directory.is_some() || ctx.config.directory.is_some();
    if have_chart && have_directory {
        let chart = load_chart(ctx, args, ws)?;
        let load = load_directory(ctx, args, &chart, ws)?;
        let records = apply_non_person_policy(ctx, internal, &load.directory);
        Ok(unit_graph(ctx, args, &records, &chart, &load.directory))
    } else {
        Ok(build_graph(&internal))
    }
}

pub fn communities(ctx: &Ctx, args: &CommunitiesArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let (_, internal, _) = load_records(ctx, &args.io, &mut ws)?;
    let graph = build_graph(&internal);
    let stop = if args.exhaust {
        GnStop::Exhaust
    } else {
        GnStop::TargetComponents(args.components.unwrap_or(2))
    };
    let dendrogram = girvan_newman(&graph, stop);
    ws.write_json("dendrogram.json", &dendrogram)?;
    match best_partition(&dendrogram) {
        Ok(best) => {
            ws.write("communities.csv", export::partition_csv(&best.partition))?;
        }
        Err(_) => {
            ws.write("communities.csv", export::partition_csv(&[]))?;
        }
    }
    let effective = json!({
        "command": "communities",
        "stop": match stop {
            GnStop::Exhaust => json!("exhaust"),
            GnStop::TargetComponents(n) => json!({"target_components": n}),
        },
    });
    ws.finish("communities", ctx.seed, effective)
}

pub fn layout(ctx: &Ctx, args: &LayoutArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let graph = graph_for(ctx, &args.aggregate, &mut ws)?;
    let algorithm = match args.algo.as_deref() {
        Some("force") => LayoutAlgorithm::Force,
        Some("circular") => LayoutAlgorithm::Circular,
        Some(other) => return Err(usage(format!("unknown layout algorithm {other:?}"))),
        None => ctx.config.layout.algorithm,
    };
    write_layout_artifacts(ctx, &mut ws, &graph, algorithm)?;
    let effective = json!({
        "command": "layout",
        "algorithm": algorithm,
        "params": ctx.config.layout,
        "style": ctx.config.style,
    });
    ws.finish("layout", ctx.seed, effective)
}

fn write_layout_artifacts(
    ctx: &Ctx,
    ws: &mut Workspace,
    graph: &EmailGraph,
    algorithm: LayoutAlgorithm,
) -> Result<(), CliError> {
    let placed = match algorithm {
        LayoutAlgorithm::Force => force_layout(graph, &ctx.config.layout.force_params(), ctx.seed)?,
        LayoutAlgorithm::Circular => circular_layout(graph, &default_circular_ordering(graph))?,
    };
    let values: BTreeMap<String, f64> = match ctx.config.layout.scheme {
        StyleScheme::BetweennessLog => {
            let scores = betweenness_centrality(graph, &BetweennessOptions::default());
            graph
                .nodes()
                .iter()
                .zip(scores)
                .map(|(n, s)| (n.id.clone(), s))
                .collect()
        }
        StyleScheme::TotalDegree => BTreeMap::new(),
    };
    let attrs = style(graph, ctx.config.layout.scheme, &values, &ctx.config.style)?;
    for format in [
        orgnet::RenderFormat::Svg,
        orgnet::RenderFormat::Dot,
        orgnet::RenderFormat::GraphMl,
    ] {
        let document = export::render(graph, &placed, &attrs, format)?;
        ws.write(&format!("layout.{}", format.extension()), document)?;
    }
    ws.write_json(
        "layout_report.json",
        &json!({
            "iterations": placed.iterations,
            "max_displacement": placed.max_displacement,
            "converged": placed.converged,
        }),
    )?;
    Ok(())
}

/// Category enumeration order, then id, for circular layouts.
fn default_circular_ordering(graph: &EmailGraph) -> Vec<String> {
    let rank = |category: Option<UnitCategory>| -> usize {
        match category {
            Some(c) => UnitCategory::CANONICAL
                .iter()
                .position(|&k| k == c)
                .unwrap_or(UnitCategory::CANONICAL.len()),
            None => UnitCategory::CANONICAL.len() + 1,
        }
    };
    let mut ids: Vec<(usize, String)> = graph
        .nodes()
        .iter()
        .map(|n| (rank(n.category), n.id.clone()))
        .collect();
    ids.sort();
    ids.into_iter().map(|(_, id)| id).collect()
}

pub fn tally(ctx: &Ctx, args: &AggregateArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    // External endpoints matter here, so no internal restriction.
    let (cleaned, _, _) = load_records(ctx, &args.io, &mut ws)?;
    let chart = load_chart(ctx, args, &mut ws)?;
    let load = load_directory(ctx, args, &chart, &mut ws)?;
    let tally = external_domain_tally(&cleaned, &load.directory, &chart, &ctx.config.tld)?;
    ws.write("tally.csv", tally.to_csv())?;
    ws.write_json("tally.json", &tally)?;
    let effective = json!({
        "command": "tally",
        "tld": ctx.config.tld,
    });
    ws.finish("tally", ctx.seed, effective)
}

pub fn degree_dist(ctx: &Ctx, args: &DegreeArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let mode = degree_mode(ctx, args)?;
    let (_, internal, _) = load_records_or_synthetic(ctx, &args.io, &mut ws)?;
    let graph = build_graph(&internal);
    let dist = graph.out_degree_distribution(mode);
    ws.write("degree.csv", dist.to_csv())?;
    ws.write_json(
        "degree_report.json",
        &json!({
            "mode": mode,
            "total_nodes": dist.total_nodes,
            "nodes_with_out_degree": dist.mass(),
        }),
    )?;
    let effective = json!({"command": "degree-dist", "mode": mode});
    ws.finish("degree-dist", ctx.seed, effective)
}

fn degree_mode(ctx: &Ctx, args: &DegreeArgs) -> Result<DegreeMode, CliError> {
    match args.mode.as_deref() {
        None => Ok(ctx.config.model.degree_mode),
        Some("distinct-recipients") => Ok(DegreeMode::DistinctRecipients),
        Some("total-messages") => Ok(DegreeMode::TotalMessages),
        Some(other) => Err(usage(format!(
            "unknown degree mode {other:?} (distinct-recipients, total-messages)"
        ))),
    }
}

/// Like [`load_records`], but falls back to a `synthetic_log.csv` left in
/// the output directory by `simulate`, so the simulate / degree-dist /
/// fit chain works without repeated flags.
fn load_records_or_synthetic(
    ctx: &Ctx,
    io: &IoArgs,
    ws: &mut Workspace,
) -> Result<(Vec<EmailRecord>, Vec<EmailRecord>, IngestReport), CliError> {
    if io.log.is_none() && ctx.config.log.is_none() {
        let candidate = ctx.out_dir.join("synthetic_log.csv");
        if candidate.exists() {
            let synthetic = IoArgs {
                log: Some(candidate),
                ..io.clone()
            };
            return load_records(ctx, &synthetic, ws);
        }
    }
    load_records(ctx, io, ws)
}

pub fn fit(ctx: &Ctx, args: &FitArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let path = args
        .degree
        .clone()
        .unwrap_or_else(|| ctx.out_dir.join("degree.csv"));
    if !path.exists() {
        return Err(usage(format!(
            "no degree distribution at {}; pass --degree or run degree-dist first",
            path.display()
        )));
    }
    let bytes = ws.note_input(&path)?;
    let dist = DegreeDistribution::from_csv(bytes.as_slice())?;
    let cutoff = args.cutoff.unwrap_or(ctx.config.model.cutoff);
    let options = FitOptions {
        log_binning_ratio: args.log_binning.or(ctx.config.model.log_binning_ratio),
    };
    let fit = fit_power_law_with(&dist, cutoff, &options)?;
    ws.write_json("fit.json", &fit)?;
    let effective = json!({
        "command": "fit",
        "cutoff": cutoff,
        "log_binning_ratio": options.log_binning_ratio,
    });
    ws.finish("fit", ctx.seed, effective)
}

pub fn infer(ctx: &Ctx, args: &InferArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let fit = match (args.beta, args.intercept) {
        (Some(beta), Some(intercept)) => PowerLawFit {
            beta,
            intercept,
            w_cutoff: 0,
            residual: 0.0,
            points_used: 0,
        },
        _ => {
            let path = args
                .fit
                .clone()
                .unwrap_or_else(|| ctx.out_dir.join("fit.json"));
            if !path.exists() {
                return Err(usage(format!(
                    "no fit report at {}; pass --fit or --beta/--intercept",
                    path.display()
                )));
            }
            let bytes = ws.note_input(&path)?;
            serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Data(format!("bad fit report: {e}")))?
        }
    };
    let assumed_l = args.l.unwrap_or(ctx.config.model.assumed_l);
    let n_input = args
        .n_input
        .ok_or_else(|| usage("pass --N, the node count of the fitted network"))?;
    let report = infer_structure(&fit, assumed_l, n_input)?;
    ws.write_json("inference.json", &report)?;
    let effective = json!({
        "command": "infer",
        "assumed_l": assumed_l,
        "n_input": n_input,
    });
    ws.finish("infer", ctx.seed, effective)
}

pub fn simulate(ctx: &Ctx, args: &SimulateArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let params = HierarchyParams::new(args.employees, args.l, args.a, args.x)?;
    let noise = NoiseParams {
        coverage_p: args.coverage_p.unwrap_or(1.0),
        background_mean_degree: args.background.unwrap_or(0.0),
    };
    let graph = generate_broadcast_network(&params, &noise, ctx.seed)?;
    let records = to_email_records(&graph, 1_600_000_000);
    let mut csv = Vec::new();
    write_email_log_csv(&records, &mut csv)?;
    ws.write("synthetic_log.csv", csv)?;
    ws.write("synthetic_edges.csv", export::edge_list_csv(&graph))?;
    ws.write_json(
        "generator_params.json",
        &json!({
            "params": params,
            "noise": noise,
            "seed": ctx.seed,
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
        }),
    )?;
    let effective = json!({
        "command": "simulate",
        "params": params,
        "noise": noise,
    });
    ws.finish("simulate", ctx.seed, effective)
}

pub fn temporal(ctx: &Ctx, args: &TemporalArgs) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let (cleaned, _, _) = load_records(ctx, &args.io, &mut ws)?;
    let bin_width = args
        .bin_width
        .unwrap_or(ctx.config.temporal.bin_width_seconds);
    let tz_offset = args
        .tz_offset
        .unwrap_or(ctx.config.temporal.timezone_offset_seconds);
    write_temporal_artifacts(&mut ws, &cleaned, bin_width, tz_offset)?;
    let effective = json!({
        "command": "temporal",
        "bin_width_seconds": bin_width,
        "timezone_offset_seconds": tz_offset,
    });
    ws.finish("temporal", ctx.seed, effective)
}

fn write_temporal_artifacts(
    ws: &mut Workspace,
    records: &[EmailRecord],
    bin_width: i64,
    tz_offset: i32,
) -> Result<(), CliError> {
    let window = match records.iter().map(|r| r.timestamp).minmax() {
        Some((min, max)) => {
            let start = min - min.rem_euclid(bin_width);
            (start, max + 1)
        }
        None => (0, 0),
    };
    let emails = orgnet::emails_per_bin(records, window, bin_width)?;
    let senders = orgnet::senders_per_bin(records, window, bin_width)?;
    ws.write("emails_per_bin.csv", emails.to_csv())?;
    ws.write("senders_per_bin.csv", senders.to_csv())?;
    ws.write_json("weekday.json", &orgnet::weekday_profile(records, tz_offset))?;
    Ok(())
}

trait MinMax<T> {
    fn minmax(self) -> Option<(T, T)>;
}

impl<I: Iterator<Item = i64>> MinMax<i64> for I {
    fn minmax(self) -> Option<(i64, i64)> {
        self.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

pub fn pipeline(ctx: &Ctx) -> Result<(), CliError> {
    let mut ws = Workspace::create(&ctx.out_dir)?;
    let io = IoArgs::default();
    let aggregate_args = AggregateArgs::default();

    // Ingest.
    let (cleaned, internal, report) = load_records(ctx, &io, &mut ws)?;
    let mut csv = Vec::new();
    write_email_log_csv(&cleaned, &mut csv)?;
    ws.write("records_clean.csv", csv)?;
    ws.write_json("ingest_report.json", &report)?;

    // Aggregate to units.
    let chart = load_chart(ctx, &aggregate_args, &mut ws)?;
    let load = load_directory(ctx, &aggregate_args, &chart, &mut ws)?;
    let internal = apply_non_person_policy(ctx, internal, &load.directory);
    let graph = unit_graph(ctx, &aggregate_args, &internal, &chart, &load.directory);
    write_graph_artifacts(&mut ws, &graph, "unit")?;

    // Stats on the unit graph.
    let scores = betweenness_centrality(&graph, &BetweennessOptions::default());
    ws.write(
        "betweenness.csv",
        export::node_scores_csv(&graph, "betweenness", &scores),
    )?;

    // Layout of the unit graph.
    write_layout_artifacts(ctx, &mut ws, &graph, ctx.config.layout.algorithm)?;

    // Degree distribution of the internal address graph.
    let address_graph = build_graph(&internal);
    let dist = address_graph.out_degree_distribution(ctx.config.model.degree_mode);
    ws.write("degree.csv", dist.to_csv())?;

    // Fit and inference.
    let options = FitOptions {
        log_binning_ratio: ctx.config.model.log_binning_ratio,
    };
    let fit = fit_power_law_with(&dist, ctx.config.model.cutoff, &options)?;
    ws.write_json("fit.json", &fit)?;
    let inference = infer_structure(
        &fit,
        ctx.config.model.assumed_l,
        address_graph.node_count() as f64,
    )?;
    ws.write_json("inference.json", &inference)?;

    // Temporal series on the cleaned (unrestricted) records.
    write_temporal_artifacts(
        &mut ws,
        &cleaned,
        ctx.config.temporal.bin_width_seconds,
        ctx.config.temporal.timezone_offset_seconds,
    )?;

    let effective = json!({
        "command": "pipeline",
        "config": ctx.config,
    });
    ws.finish("pipeline", ctx.seed, effective)
}
