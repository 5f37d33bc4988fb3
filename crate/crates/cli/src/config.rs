//! Experiment configs: JSON documents with optional per-command blocks,
//! plus `--set path=value` overrides applied before deserialization so grid
//! sweeps can be scripted without editing files.

use crate::commands::CliError;
use sdelab_core::{Initial, Interval, ModelSpec, SimConfig};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.points < 2 || !(self.from < self.to) {
            return Err(CliError::Config(format!(
                "grid requires from < to and points >= 2, got from = {}, to = {}, points = {}",
                self.from, self.to, self.points
            )));
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.from + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleBlock {
    pub interval: Interval,
    /// Reference point for the integrals; defaults to the midpoint (or one
    /// unit inside a finite endpoint).
    pub reference: Option<f64>,
    pub grid: GridSpec,
}

fn default_density_points() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityBlock {
    /// Support to normalize over; defaults to the first interval on which a
    /// stationary density is granted.
    pub support: Option<Interval>,
    #[serde(default = "default_density_points")]
    pub points: usize,
}

impl Default for DensityBlock {
    fn default() -> Self {
        DensityBlock { support: None, points: default_density_points() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdpBlock {
    pub lambda: f64,
    pub mu: f64,
    pub kappa: f64,
    pub alpha: f64,
    /// Optional evaluation point for the quasipotential (default: 0).
    pub x: Option<f64>,
    /// Optional limit parameter c = lim lambda/(1-alpha) for the regime
    /// report.
    pub c: Option<f64>,
}

fn default_initial() -> Initial {
    Initial::Point { x0: 1.0 }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SimBlock {
    #[serde(flatten)]
    pub cfg: SimConfig,
    #[serde(default = "default_initial")]
    pub initial: Initial,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<ModelSpec>,
    pub scale: Option<ScaleBlock>,
    pub density: Option<DensityBlock>,
    pub ldp: Option<LdpBlock>,
    pub sim: Option<SimBlock>,
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn model(&self) -> Result<&ModelSpec, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("config is missing the `model` block".into()))
    }
}

/// Parsed config together with the canonical bytes it was parsed from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    /// Canonical JSON (sorted keys) of the document after overrides.
    pub canonical: String,
    pub sha256: String,
}

/// Set `value` at a dotted `path` inside a JSON object tree, creating
/// intermediate objects as needed.
fn set_path(root: &mut serde_json::Value, path: &str, value: serde_json::Value) -> Result<(), CliError> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Config(format!("empty segment in override path {path:?}")));
        }
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("override path {path:?} descends into a non-object"))
        })?;
        if i + 1 == parts.len() {
            map.insert((*part).to_string(), value);
            return Ok(());
        }
        node = map
            .entry((*part).to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one segment")
}

/// Read the config file (or start from an empty document), apply `--set`
/// overrides and the `--seed` / `--format` flags, and deserialize.
pub fn load_config(
    path: Option<&Path>,
    sets: &[String],
    seed: Option<u64>,
    format: Option<Format>,
) -> Result<LoadedConfig, CliError> {
    let mut doc: serde_json::Value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("malformed JSON in {}: {e}", p.display())))?
        }
        None => serde_json::json!({}),
    };
    if !doc.is_object() {
        return Err(CliError::Config("config document must be a JSON object".into()));
    }
    for entry in sets {
        let (key, raw) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override {entry:?} is not of the form path=value")))?;
        // Values parse as JSON when they can (numbers, booleans, quoted
        // strings, objects); anything else is taken as a bare string.
        let value = serde_json::from_str(raw).unwrap_or(serde_json::Value::String(raw.to_string()));
        set_path(&mut doc, key, value)?;
    }
    if let Some(s) = seed {
        set_path(&mut doc, "sim.master_seed", serde_json::json!(s))?;
    }
    let config: ExperimentConfig = serde_json::from_value(doc.clone())
        .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    let config = ExperimentConfig { format: format.or(config.format), ..config };
    // serde_json's default map is sorted by key, so this rendering is
    // canonical for hashing.
    let canonical = serde_json::to_string(&doc).expect("JSON value always serializes");
    let sha256 = hex::encode(Sha256::digest(canonical.as_bytes()));
    Ok(LoadedConfig { config, canonical, sha256 })
}
