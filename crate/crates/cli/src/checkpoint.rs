//! Versioned JSON checkpoints for model parameters: shape headers plus
//! row-major floats, no binary payloads.

use std::collections::BTreeMap;

use hoegkit_core::model::{Dense, LayerParams, ModelParams};
use hoegkit_core::{EdgeType, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::graphs::MatrixJson;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub weight: MatrixJson,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeightJson {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub weight: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerJson {
    pub self_weights: BTreeMap<String, MatrixJson>,
    pub edge_weights: Vec<EdgeWeightJson>,
    pub bias: Vec<f64>,
    pub prelu_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointJson {
    pub checkpoint_version: u32,
    /// Graph-level (pooled) prediction head, for the subgraph-sampling mode.
    pub pooled: bool,
    pub input_proj: BTreeMap<String, DenseJson>,
    pub layers: Vec<LayerJson>,
    pub head: DenseJson,
}

fn matrix_json(m: &Matrix) -> MatrixJson {
    MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        data: m.data().to_vec(),
    }
}

fn matrix_back(m: &MatrixJson) -> Result<Matrix> {
    Matrix::from_vec(m.rows, m.cols, m.data.clone()).map_err(|e| CliError::Parse(e.to_string()))
}

fn dense_json(d: &Dense) -> DenseJson {
    DenseJson {
        weight: matrix_json(&d.weight),
        bias: d.bias.clone(),
    }
}

fn dense_back(d: &DenseJson) -> Result<Dense> {
    Ok(Dense {
        weight: matrix_back(&d.weight)?,
        bias: d.bias.clone(),
    })
}

pub fn serialize_params(params: &ModelParams, pooled: bool) -> String {
    let doc = CheckpointJson {
        checkpoint_version: CHECKPOINT_VERSION,
        pooled,
        input_proj: params
            .input_proj
            .iter()
            .map(|(ty, d)| (ty.clone(), dense_json(d)))
            .collect(),
        layers: params
            .layers
            .iter()
            .map(|l| LayerJson {
                self_weights: l
                    .self_weights
                    .iter()
                    .map(|(ty, m)| (ty.clone(), matrix_json(m)))
                    .collect(),
                edge_weights: l
                    .edge_weights
                    .iter()
                    .map(|(et, m)| EdgeWeightJson {
                        subject: et.subject.clone(),
                        predicate: et.predicate.clone(),
                        object: et.object.clone(),
                        weight: matrix_json(m),
                    })
                    .collect(),
                bias: l.bias.clone(),
                prelu_slope: l.prelu_slope,
            })
            .collect(),
        head: dense_json(&params.head),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable checkpoint");
    text.push('\n');
    text
}

pub fn parse_params(bytes: &[u8]) -> Result<(ModelParams, bool)> {
    let doc: CheckpointJson = serde_json::from_slice(bytes)
        .map_err(|e| CliError::Parse(format!("malformed checkpoint JSON: {e}")))?;
    if doc.checkpoint_version != CHECKPOINT_VERSION {
        return Err(CliError::Parse(format!(
            "unsupported checkpoint_version {}",
            doc.checkpoint_version
        )));
    }
    let mut input_proj = BTreeMap::new();
    for (ty, d) in &doc.input_proj {
        input_proj.insert(ty.clone(), dense_back(d)?);
    }
    let mut layers = Vec::new();
    for l in &doc.layers {
        let mut self_weights = BTreeMap::new();
        for (ty, m) in &l.self_weights {
            self_weights.insert(ty.clone(), matrix_back(m)?);
        }
        let mut edge_weights = BTreeMap::new();
        for e in &l.edge_weights {
            edge_weights.insert(
                EdgeType {
                    subject: e.subject.clone(),
                    predicate: e.predicate.clone(),
                    object: e.object.clone(),
                },
                matrix_back(&e.weight)?,
            );
        }
        layers.push(LayerParams {
            self_weights,
            edge_weights,
            bias: l.bias.clone(),
            prelu_slope: l.prelu_slope,
        });
    }
    Ok((
        ModelParams {
            input_proj,
            layers,
            head: dense_back(&doc.head)?,
        },
        doc.pooled,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hoegkit_core::model::{ModelConfig, TypeSignature};
    use hoegkit_core::synth::random_toy_hoeg;

    #[test]
    fn checkpoint_round_trip() {
        for seed in 0..5u64 {
            let graph = random_toy_hoeg(seed, 5, 2);
            let cfg = ModelConfig {
                hidden_dim: 8,
                seed,
                ..ModelConfig::default()
            };
            let params = ModelParams::init(&TypeSignature::of(&graph), &cfg);
            let text = serialize_params(&params, seed % 2 == 0);
            let (back, pooled) = parse_params(text.as_bytes()).unwrap();
            assert_eq!(back, params);
            assert_eq!(pooled, seed % 2 == 0);
        }
    }
}
