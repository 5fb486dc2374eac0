//! Run configuration: one JSON file, overridable by flags.

use std::path::{Path, PathBuf};

use hoegkit_core::model::ModelConfig;
use hoegkit_core::{ExtractionStrategy, FeatureFlags};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoder {
    Efg,
    Hoeg,
    EfgSs,
}

impl Encoder {
    pub fn name(&self) -> &'static str {
        match self {
            Encoder::Efg => "efg",
            Encoder::Hoeg => "hoeg",
            Encoder::EfgSs => "efg_ss",
        }
    }

    pub fn parse(text: &str) -> Result<Encoder> {
        match text {
            "efg" => Ok(Encoder::Efg),
            "hoeg" => Ok(Encoder::Hoeg),
            "efg_ss" => Ok(Encoder::EfgSs),
            other => Err(CliError::Usage(format!(
                "unknown encoder \"{other}\" (expected efg | hoeg | efg_ss)"
            ))),
        }
    }
}

fn default_extraction() -> String {
    "cc".to_string()
}

fn default_splits() -> [f64; 3] {
    [0.56, 0.14, 0.30]
}

fn default_encoder() -> Encoder {
    Encoder::Hoeg
}

fn default_dataset() -> String {
    "dataset".to_string()
}

fn default_feature_flags() -> FeatureFlags {
    FeatureFlags::default()
}

fn default_subgraph_k() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    /// "cc" or "leading:<type>".
    #[serde(default = "default_extraction")]
    pub extraction: String,
    #[serde(default = "default_splits")]
    pub splits: [f64; 3],
    #[serde(default)]
    pub seed: u64,
    /// Keep extraction order instead of shuffling when splitting.
    #[serde(default)]
    pub chronological_splits: bool,
    #[serde(default = "default_encoder")]
    pub encoder: Encoder,
    #[serde(default = "default_dataset")]
    pub dataset: String,
    #[serde(default = "default_feature_flags")]
    pub features: FeatureFlags,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default = "default_subgraph_k")]
    pub subgraph_k: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Usage(format!("{}: invalid config: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable config");
        text.push('\n');
        text
    }

    pub fn strategy(&self) -> Result<ExtractionStrategy> {
        parse_strategy(&self.extraction)
    }
}

pub fn parse_strategy(text: &str) -> Result<ExtractionStrategy> {
    if text == "cc" || text == "connected-components" {
        return Ok(ExtractionStrategy::ConnectedComponents);
    }
    if let Some(ty) = text.strip_prefix("leading:") {
        if ty.is_empty() {
            return Err(CliError::Usage("leading: requires a type name".into()));
        }
        return Ok(ExtractionStrategy::LeadingType(ty.to_string()));
    }
    Err(CliError::Usage(format!(
        "unknown extraction \"{text}\" (expected cc | leading:TYPE)"
    )))
}
