//! Run configuration: defaults, optional TOML file, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use primon_core::xreal::MIN_PRECISION;
use serde::Deserialize;

/// Report encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub quadrature_tolerance: f64,
    pub prime_cache_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    /// 0 selects the rayon default.
    pub thread_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: primon_core::DEFAULT_PRECISION,
            quadrature_tolerance: 1e-20,
            prime_cache_path: None,
            output_format: OutputFormat::Csv,
            thread_count: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("invalid run configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.precision_bits < MIN_PRECISION {
            bail!("precision_bits must be >= {MIN_PRECISION}, got {}", self.precision_bits);
        }
        if !(self.quadrature_tolerance > 0.0) || !self.quadrature_tolerance.is_finite() {
            bail!("quadrature_tolerance must be finite and > 0, got {}", self.quadrature_tolerance);
        }
        Ok(())
    }
}
