//! The hierarchical broadcast model of email out-degree distributions.
//!
//! A top broadcaster reaches all `N` employees. Each manager talks
//! directly to `l` managers one level down, each of whom broadcasts to the
//! `N/l` employees of their subdivision, and every managerial slot comes
//! with `a` broadcasters in total (the manager plus `a - 1` support
//! staff). Compounding the recursion, level `j` holds `(a*l)^j`
//! broadcasters that each reach `N/l^j` employees, which on a log-log plot
//! of the count `n` of nodes against out-degree `w` is a straight line of
//! slope `log(a*l)/log(l)`.
//!
//! This module generates such networks exactly (with optional coverage and
//! background noise), fits the power-law tail, and inverts a fit back into
//! organizational parameters.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeDistribution, EmailGraph, GraphEdge, GraphNode};
use crate::ingest::{Address, EmailRecord};

/// Organizational parameters of the broadcast hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyParams {
    /// Total employees reachable by the top broadcaster.
    pub employees: u64,
    /// Span of control: direct subordinate managers per manager (>= 2).
    pub span: u64,
    /// Broadcasters per managerial slot: manager plus support (>= 1).
    pub support: u64,
    /// Hierarchy levels below the top (>= 0).
    pub levels: u32,
}

impl HierarchyParams {
    pub fn new(employees: u64, span: u64, support: u64, levels: u32) -> Result<Self> {
        let params = HierarchyParams {
            employees,
            span,
            support,
            levels,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        if self.employees == 0 {
            return Err(Error::InvalidParams("employees must be positive".into()));
        }
        if self.span < 2 {
            return Err(Error::InvalidParams("span must be at least 2".into()));
        }
        if self.support < 1 {
            return Err(Error::InvalidParams("support must be at least 1".into()));
        }
        let denom = self
            .span
            .checked_pow(self.levels)
            .ok_or_else(|| Error::InvalidParams("span^levels overflows".into()))?;
        if self.employees % denom != 0 {
            return Err(Error::InvalidParams(format!(
                "employees must be a multiple of span^levels = {denom} for exact generation"
            )));
        }
        Ok(())
    }

    /// Division size at level `j`.
    fn division_size(&self, level: u32) -> u64 {
        self.employees / self.span.pow(level)
    }
}

/// Noise knobs for the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Probability that a broadcaster reaches any given employee of its
    /// division; 1 = exact broadcast.
    pub coverage_p: f64,
    /// Mean out-degree of uniform employee-to-employee background traffic,
    /// modeling the non-hierarchical low-degree regime.
    pub background_mean_degree: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            coverage_p: 1.0,
            background_mean_degree: 0.0,
        }
    }
}

impl NoiseParams {
    fn validate(&self) -> Result<()> {
        if !(self.coverage_p > 0.0 && self.coverage_p <= 1.0) {
            return Err(Error::InvalidParams("coverage_p must be in (0, 1]".into()));
        }
        if !(self.background_mean_degree >= 0.0) {
            return Err(Error::InvalidParams(
                "background_mean_degree must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Predicted power-law exponent `log(a*l)/log(l)` (natural logs).
pub fn predicted_exponent(span: f64, support: f64) -> Result<f64> {
    if !(span >= 2.0) {
        return Err(Error::InvalidParams("span must be >= 2".into()));
    }
    if !(support >= 1.0) {
        return Err(Error::InvalidParams("support must be >= 1".into()));
    }
    Ok((support * span).ln() / span.ln())
}

/// Predicted number of nodes with out-degree `w`.
///
/// At lattice points `w = N/l^j` (integer `j` in `0..=levels`) this is the
/// exact integer `(a*l)^j`; elsewhere it is the real-valued extension
/// `(N/w)^beta`.
pub fn predicted_count(w: f64, params: &HierarchyParams) -> Result<f64> {
    params.validate()?;
    let employees = params.employees as f64;
    if !(w > 0.0) {
        return Err(Error::InvalidArgument("w must be positive".into()));
    }
    if w > employees {
        return Err(Error::InvalidArgument(format!(
            "w = {w} exceeds the top broadcaster degree N = {employees}"
        )));
    }
    let span = params.span as f64;
    let j_real = (employees / w).ln() / span.ln();
    let j = j_real.round();
    if (j_real - j).abs() < 1e-9 && j >= 0.0 && j <= params.levels as f64 {
        // Exact lattice point.
        return Ok(((params.support * params.span) as f64).powi(j as i32));
    }
    let beta = predicted_exponent(span, params.support as f64)?;
    Ok((employees / w).powf(beta))
}

/// Generate the broadcast network as a directed graph.
///
/// Employee nodes are partitioned into `l^j` nested divisions at each
/// level `j`; level `j` contributes `a^j` broadcaster nodes per division,
/// each with a weight-1 edge to every employee of its division (or to each
/// independently with probability `coverage_p`). Background traffic adds
/// uniform employee-to-employee edges with the configured mean out-degree.
/// Broadcasters are distinct from the `N` employees, so with no background
/// every employee has out-degree 0. Deterministic for a given seed.
pub fn generate_broadcast_network(
    params: &HierarchyParams,
    noise: &NoiseParams,
    seed: u64,
) -> Result<EmailGraph> {
    params.validate()?;
    noise.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let levels = params.levels;
    let mut broadcasters = 0u64;
    for level in 0..=levels {
        broadcasters += (params.support * params.span)
            .checked_pow(level)
            .ok_or_else(|| Error::InvalidParams("broadcaster count overflows".into()))?;
    }
    let total_nodes: usize = broadcasters
        .checked_add(params.employees)
        .filter(|&n| n <= u32::MAX as u64)
        .ok_or_else(|| Error::InvalidParams("node count exceeds u32 range".into()))?
        as usize;

    let mut nodes = Vec::with_capacity(total_nodes);
    let mut edges: Vec<GraphEdge> = Vec::new();
    let employee_base = broadcasters as u32;

    // Broadcasters, level by level, division by division, slot by slot.
    for level in 0..=levels {
        let divisions = params.span.pow(level);
        let division_size = params.division_size(level);
        let slots = params.support.pow(level);
        for division in 0..divisions {
            let first_employee = employee_base + (division * division_size) as u32;
            for slot in 0..slots {
                let src = nodes.len() as u32;
                nodes.push(GraphNode::address(format!(
                    "b{level}-{division}-{slot}@model.test"
                )));
                if noise.coverage_p >= 1.0 {
                    for k in 0..division_size as u32 {
                        edges.push(GraphEdge {
                            src,
                            dst: first_employee + k,
                            weight: 1,
                        });
                    }
                } else {
                    for k in 0..division_size as u32 {
                        if rng.random::<f64>() < noise.coverage_p {
                            edges.push(GraphEdge {
                                src,
                                dst: first_employee + k,
                                weight: 1,
                            });
                        }
                    }
                }
            }
        }
    }
    for e in 0..params.employees {
        nodes.push(GraphNode::address(format!("e{e}@model.test")));
    }

    // Background employee-to-employee traffic.
    if noise.background_mean_degree > 0.0 && params.employees > 1 {
        let poisson = Poisson::new(noise.background_mean_degree)
            .map_err(|e| Error::InvalidParams(format!("bad background rate: {e}")))?;
        for e in 0..params.employees {
            let src = employee_base + e as u32;
            let count = poisson.sample(&mut rng) as u64;
            let mut targets: Vec<u32> = (0..count)
                .map(|_| {
                    let mut t = rng.random_range(0..params.employees - 1);
                    if t >= e {
                        t += 1;
                    }
                    employee_base + t as u32
                })
                .collect();
            targets.sort_unstable();
            let mut k = 0;
            while k < targets.len() {
                let dst = targets[k];
                let mut weight = 0u64;
                while k < targets.len() && targets[k] == dst {
                    weight += 1;
                    k += 1;
                }
                edges.push(GraphEdge { src, dst, weight });
            }
        }
    }

    Ok(EmailGraph::from_sorted_parts(nodes, edges))
}

/// Flatten a generated network into synthetic email records: one broadcast
/// record per sender covering every out-neighbor once, plus one
/// single-recipient record per extra unit of edge weight. Timestamps are
/// an arithmetic sequence from `base_timestamp`.
pub fn to_email_records(graph: &EmailGraph, base_timestamp: i64) -> Vec<EmailRecord> {
    let mut records = Vec::new();
    let mut timestamp = base_timestamp;
    let mut next = |records: &mut Vec<EmailRecord>, sender: &Address, recipients: Vec<Address>| {
        records.push(EmailRecord {
            timestamp,
            sender: sender.clone(),
            recipients,
        });
        timestamp += 7;
    };
    let adjacency = graph.out_adjacency();
    for (i, neighbors) in adjacency.iter().enumerate() {
        if neighbors.is_empty() {
            continue;
        }
        let sender = Address::parse(&graph.node(i as u32).id).expect("generator ids are addresses");
        let broadcast: Vec<Address> = neighbors
            .iter()
            .map(|&(dst, _)| Address::parse(&graph.node(dst).id).expect("address id"))
            .collect();
        next(&mut records, &sender, broadcast);
        for &(dst, weight) in neighbors {
            for _ in 1..weight {
                let recipient = Address::parse(&graph.node(dst).id).expect("address id");
                next(&mut records, &sender, vec![recipient]);
            }
        }
    }
    records
}

/// A fitted power-law tail of a degree distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Slope magnitude of the log-log fit (the model's `log(al)/log(l)`).
    pub beta: f64,
    /// Fitted `log n` at `log w = 0`.
    pub intercept: f64,
    #[serde(rename = "cutoff")]
    pub w_cutoff: u64,
    /// Root-mean-square of the log-count residuals.
    pub residual: f64,
    pub points_used: usize,
}

/// Optional pre-processing for [`fit_power_law_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitOptions {
    /// Merge histogram points into geometric bins of this width ratio
    /// before fitting; each non-empty bin becomes one point at its
    /// count-weighted geometric center with the bin's total count.
    ///
    /// Off by default. The raw scatter is fragile under coverage noise
    /// (a level's mass splinters over adjacent degrees, deflating every
    /// count); binning restores the level totals.
    pub log_binning_ratio: Option<f64>,
}

/// Ordinary least squares of `log n` on `log w` over points with
/// `w >= w_cutoff`. Degrees absent from the histogram are simply not
/// points. At least two qualifying points are required.
pub fn fit_power_law(distribution: &DegreeDistribution, w_cutoff: u64) -> Result<PowerLawFit> {
    fit_power_law_with(distribution, w_cutoff, &FitOptions::default())
}

/// [`fit_power_law`] with optional logarithmic binning.
pub fn fit_power_law_with(
    distribution: &DegreeDistribution,
    w_cutoff: u64,
    options: &FitOptions,
) -> Result<PowerLawFit> {
    let points: Vec<(f64, f64)> = match options.log_binning_ratio {
        Some(ratio) if !(ratio > 1.0) => {
            return Err(Error::InvalidArgument(
                "log binning ratio must exceed 1".into(),
            ));
        }
        Some(ratio) => log_bin(distribution, w_cutoff, ratio),
        None => distribution
            .counts
            .range(w_cutoff..)
            .filter(|&(_, &n)| n >= 1)
            .map(|(&w, &n)| ((w as f64).ln(), (n as f64).ln()))
            .collect(),
    };
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} point(s) with w >= {w_cutoff}; at least 2 required",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all qualifying points share one degree value".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit {
        beta: -slope,
        intercept,
        w_cutoff,
        residual,
        points_used: points.len(),
    })
}

fn log_bin(distribution: &DegreeDistribution, w_cutoff: u64, ratio: f64) -> Vec<(f64, f64)> {
    let mut points = Vec::new();
    let max_w = match distribution.counts.range(w_cutoff..).next_back() {
        Some((&w, _)) => w as f64,
        None => return points,
    };
    let mut lo = w_cutoff.max(1) as f64;
    while lo <= max_w {
        let hi = lo * ratio;
        let mut total = 0u64;
        let mut log_center_sum = 0.0;
        for (&w, &n) in distribution.counts.range(w_cutoff..) {
            let w_f = w as f64;
            if w_f >= lo && w_f < hi {
                total += n;
                log_center_sum += n as f64 * w_f.ln();
            }
        }
        if total > 0 {
            points.push((log_center_sum / total as f64, (total as f64).ln()));
        }
        lo = hi;
    }
    points
}

/// Organizational parameters inferred from a fitted tail.
///
/// Quantities are reported from the model's formulas as written, without
/// rounding; both the caller-supplied node count and the intercept-implied
/// one are carried through the termination condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub assumed_l: f64,
    /// Broadcasters per managerial slot: `l^(beta-1)`.
    pub a_hat: f64,
    /// Node count supplied by the caller.
    pub n_input: f64,
    /// Node count implied by the fit intercept: `exp(c/beta)`.
    pub n_fit: f64,
    /// Termination level from `n_input`: `log(N)/log(a_hat * l^2)`.
    pub x_hat: f64,
    /// Lowest broadcast size: `n_input / l^x_hat`.
    pub w_min_hat: f64,
    /// Managers or support staff a typical employee hears from:
    /// `(x_hat + 1) * a_hat`.
    pub contacts_per_employee: f64,
    /// Termination level computed from `n_fit` instead of `n_input`.
    pub x_hat_from_n_fit: f64,
    /// Lowest broadcast size computed from `n_fit`.
    pub w_min_hat_from_n_fit: f64,
}

/// Invert a fitted tail into organizational parameters, assuming a span
/// of control.
///
/// The exponent must exceed 1 for the model to apply.
pub fn infer_structure(fit: &PowerLawFit, assumed_l: f64, n_input: f64) -> Result<InferenceReport> {
    if !(assumed_l >= 2.0) {
        return Err(Error::InvalidParams("assumed_l must be >= 2".into()));
    }
    if !(n_input >= 1.0) {
        return Err(Error::InvalidParams("n_input must be >= 1".into()));
    }
    if !(fit.beta > 1.0) {
        return Err(Error::ModelInapplicable(format!(
            "fitted exponent {} <= 1; the broadcast hierarchy requires log(al)/log(l) > 1",
            fit.beta
        )));
    }
    let a_hat = assumed_l.powf(fit.beta - 1.0);
    let n_fit = (fit.intercept / fit.beta).exp();
    let denominator = (a_hat * assumed_l * assumed_l).ln();
    let x_hat = n_input.ln() / denominator;
    let x_hat_from_n_fit = n_fit.ln() / denominator;
    Ok(InferenceReport {
        assumed_l,
        a_hat,
        n_input,
        n_fit,
        x_hat,
        w_min_hat: n_input / assumed_l.powf(x_hat),
        contacts_per_employee: (x_hat + 1.0) * a_hat,
        x_hat_from_n_fit,
        w_min_hat_from_n_fit: n_fit / assumed_l.powf(x_hat_from_n_fit),
    })
}
