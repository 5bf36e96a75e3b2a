use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policies::PolicySpec;

/// One layer of sweep settings, as read from a TOML file or from CLI flags.
/// Later layers override earlier ones field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<usize>>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<u64>>,
    #[serde(rename = "alpha", skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicySpec>>,
    #[serde(rename = "instances", skip_serializing_if = "Option::is_none")]
    pub n_instances: Option<usize>,
    #[serde(rename = "runs", skip_serializing_if = "Option::is_none")]
    pub n_runs: Option<u64>,
    #[serde(rename = "seed", skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
    #[serde(rename = "out", skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(rename = "svg", skip_serializing_if = "Option::is_none")]
    pub emit_svg: Option<bool>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_toml(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            k_grid: over.k_grid.or(self.k_grid),
            t_grid: over.t_grid.or(self.t_grid),
            alpha_grid: over.alpha_grid.or(self.alpha_grid),
            policies: over.policies.or(self.policies),
            n_instances: over.n_instances.or(self.n_instances),
            n_runs: over.n_runs.or(self.n_runs),
            base_seed: over.base_seed.or(self.base_seed),
            output_dir: over.output_dir.or(self.output_dir),
            emit_svg: over.emit_svg.or(self.emit_svg),
        }
    }

    /// Fills unset fields with the full experimental protocol defaults.
    pub fn resolve(self) -> Result<SweepConfig> {
        let config = SweepConfig {
            k_grid: self.k_grid.unwrap_or_else(|| vec![2, 5, 10, 15, 20, 25]),
            t_grid: self.t_grid.unwrap_or_else(|| vec![100, 200, 300, 400, 500]),
            alpha_grid: self.alpha_grid.unwrap_or_else(|| vec![0.0, 0.4]),
            policies: self
                .policies
                .unwrap_or_else(|| PolicySpec::BENCHMARKS.to_vec()),
            n_instances: self.n_instances.unwrap_or(500),
            n_runs: self.n_runs.unwrap_or(500),
            base_seed: self.base_seed.unwrap_or(0),
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("results")),
            emit_svg: self.emit_svg.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }
}

/// A fully specified sweep over `K x T x alpha x policy` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_grid: Vec<usize>,
    pub t_grid: Vec<u64>,
    pub alpha_grid: Vec<f64>,
    pub policies: Vec<PolicySpec>,
    pub n_instances: usize,
    pub n_runs: u64,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.k_grid.is_empty() || self.t_grid.is_empty() || self.alpha_grid.is_empty() {
            return bad("K, T and alpha grids must be non-empty");
        }
        if self.policies.is_empty() {
            return bad("at least one policy is required");
        }
        if self.n_instances < 1 || self.n_runs < 1 {
            return bad("instances and runs must be at least 1");
        }
        for &alpha in &self.alpha_grid {
            if !(0.0..0.5).contains(&alpha) {
                return Err(Error::InvalidAlpha(alpha));
            }
        }
        for &k in &self.k_grid {
            if k == 0 {
                return Err(Error::EmptyInstance);
            }
            for &t in &self.t_grid {
                crate::engine::validate_horizon(k, t)?;
            }
        }
        Ok(())
    }

    pub fn to_layer(&self) -> ConfigLayer {
        ConfigLayer {
            k_grid: Some(self.k_grid.clone()),
            t_grid: Some(self.t_grid.clone()),
            alpha_grid: Some(self.alpha_grid.clone()),
            policies: Some(self.policies.clone()),
            n_instances: Some(self.n_instances),
            n_runs: Some(self.n_runs),
            base_seed: Some(self.base_seed),
            output_dir: Some(self.output_dir.clone()),
            emit_svg: Some(self.emit_svg),
        }
    }

    /// Canonical TOML rendering of the resolved configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_layer()).expect("config serializes")
    }

    pub fn cell_count(&self) -> usize {
        self.k_grid.len() * self.t_grid.len() * self.alpha_grid.len() * self.policies.len()
    }
}
