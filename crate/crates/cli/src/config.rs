//! The JSON pipeline configuration and its flag-override merge.
//!
//! Precedence: command-line flags beat config values; the output directory
//! additionally falls back to `$ORGNET_OUT` and then `./out`. Paths inside
//! a config file are resolved relative to the file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use orgnet::graph::DegreeMode;
use orgnet::ingest::LogFormat;
use orgnet::layout::{StyleConfig, StyleScheme};
use orgnet::{CleaningPolicy, TldConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Email log path.
    pub log: Option<PathBuf>,
    pub log_format: LogFormat,
    pub org_chart: Option<PathBuf>,
    pub directory: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Master seed; every random choice in a run flows from it.
    pub seed: Option<u64>,
    pub cleaning: CleaningPolicy,
    pub aggregation: AggregationConfig,
    pub tld: TldConfig,
    pub layout: LayoutConfig,
    pub style: StyleConfig,
    pub model: ModelConfig,
    pub temporal: TemporalConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregationConfig {
    /// Hierarchy level to lift units to; units at or above it stay
    /// themselves.
    pub level: Option<u32>,
    /// Collapse units into the seven category super-nodes instead.
    pub by_category: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub algorithm: LayoutAlgorithm,
    pub repulsion: f64,
    pub spring: f64,
    pub rest_length: f64,
    pub step: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub scheme: StyleScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutAlgorithm {
    #[default]
    Force,
    Circular,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        let force = orgnet::ForceParams::default();
        LayoutConfig {
            algorithm: LayoutAlgorithm::Force,
            repulsion: force.repulsion,
            spring: force.spring,
            rest_length: force.rest_length,
            step: force.step,
            tol: force.tol,
            max_iter: force.max_iter,
            scheme: StyleScheme::BetweennessLog,
        }
    }
}

impl LayoutConfig {
    pub fn force_params(&self) -> orgnet::ForceParams {
        orgnet::ForceParams {
            repulsion: self.repulsion,
            spring: self.spring,
            rest_length: self.rest_length,
            step: self.step,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Assumed span of control for inference.
    pub assumed_l: f64,
    /// Power-law fit cutoff: points with w >= cutoff qualify.
    pub cutoff: u64,
    /// Optional geometric bin ratio for the fit.
    pub log_binning_ratio: Option<f64>,
    pub degree_mode: DegreeMode,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            assumed_l: 4.0,
            cutoff: 40,
            log_binning_ratio: None,
            degree_mode: DegreeMode::DistinctRecipients,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemporalConfig {
    pub bin_width_seconds: i64,
    pub timezone_offset_seconds: i32,
}

impl Default for TemporalConfig {
    fn default() -> Self {
        TemporalConfig {
            bin_width_seconds: 60,
            timezone_offset_seconds: 0,
        }
    }
}

impl PipelineConfig {
    /// Load a config file, resolving its relative paths against its own
    /// directory.
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: PipelineConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for entry in [
            &mut config.log,
            &mut config.org_chart,
            &mut config.directory,
            &mut config.out_dir,
        ] {
            if let Some(p) = entry {
                if p.is_relative() {
                    *entry = Some(base.join(&p));
                }
            }
        }
        Ok(config)
    }

    /// Resolve the output directory: flag, then config, then
    /// `$ORGNET_OUT`, then `./out`.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(path) = flag {
            return path.to_path_buf();
        }
        if let Some(path) = &self.out_dir {
            return path.clone();
        }
        if let Some(env) = std::env::var_os("ORGNET_OUT") {
            return PathBuf::from(env);
        }
        PathBuf::from("out")
    }

    pub fn resolve_seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(0)
    }
}
