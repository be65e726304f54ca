use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aiaco_core::{AcoParams, DistributionChoice, SolverKind};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Overrides the default output directory when set.
pub const OUTPUT_DIR_ENV: &str = "AIACO_OUT_DIR";

pub const DEFAULT_OUTPUT_DIR: &str = "results";

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), PathBuf::from)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(BenchError::Config(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub node_sizes: Vec<usize>,
    pub graphs_per_size: usize,
    pub solvers: Vec<SolverKind>,
    pub aco_params: AcoParams,
    pub master_seed: u64,
    pub distribution: DistributionChoice,
    pub output_format: OutputFormat,
    pub output_path: PathBuf,
    /// Worker threads; 1 runs everything sequentially on the caller.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            node_sizes: vec![25, 50, 100, 250, 500],
            graphs_per_size: 50,
            solvers: SolverKind::ALL.to_vec(),
            aco_params: AcoParams::default(),
            master_seed: 0,
            distribution: DistributionChoice::Random,
            output_format: OutputFormat::Csv,
            output_path: default_output_dir(),
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let config: Self = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => serde_json::from_str(&text)?,
            _ => toml::from_str(&text)?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_sizes.is_empty() {
            return Err(BenchError::Config("node_sizes must not be empty".into()));
        }
        if let Some(n) = self.node_sizes.iter().find(|&&n| n < 2) {
            return Err(BenchError::Config(format!("node size {n} is below 2")));
        }
        if self.solvers.is_empty() {
            return Err(BenchError::Config("solvers must not be empty".into()));
        }
        if self.graphs_per_size == 0 {
            return Err(BenchError::Config(
                "graphs_per_size must be positive".into(),
            ));
        }
        if self.jobs == 0 {
            return Err(BenchError::Config("jobs must be positive".into()));
        }
        self.aco_params.validate()?;
        Ok(())
    }

    pub fn sequential(&self) -> bool {
        self.jobs <= 1
    }
}
