//! Versioned JSON schema for encoded graphs: node types, per-type feature
//! matrices (row-major with a (rows, cols) header), edge lists per edge type,
//! lookup maps, and targets.

use std::collections::BTreeMap;

use hoegkit_core::{EdgeType, Hoeg, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries, length rows * cols.
    pub data: Vec<f64>,
}

impl MatrixJson {
    fn of(m: &Matrix) -> MatrixJson {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().to_vec(),
        }
    }

    fn to_matrix(&self) -> Result<Matrix> {
        Matrix::from_vec(self.rows, self.cols, self.data.clone())
            .map_err(|e| CliError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTypeJson {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoegJson {
    pub schema_version: u32,
    pub execution_id: String,
    pub node_types: Vec<String>,
    pub features: BTreeMap<String, MatrixJson>,
    pub edge_types: Vec<EdgeTypeJson>,
    pub node_index: BTreeMap<String, BTreeMap<String, usize>>,
    pub targets: Vec<f64>,
}

pub fn serialize_hoeg(h: &Hoeg) -> String {
    let doc = HoegJson {
        schema_version: SCHEMA_VERSION,
        execution_id: h.execution_id.clone(),
        node_types: h.node_types.clone(),
        features: h
            .features
            .iter()
            .map(|(ty, m)| (ty.clone(), MatrixJson::of(m)))
            .collect(),
        edge_types: h
            .edge_types
            .iter()
            .map(|et| EdgeTypeJson {
                subject: et.subject.clone(),
                predicate: et.predicate.clone(),
                object: et.object.clone(),
                edges: h.adjacency.get(et).cloned().unwrap_or_default(),
            })
            .collect(),
        node_index: h.node_index.clone(),
        targets: h.targets.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable graph");
    text.push('\n');
    text
}

pub fn parse_hoeg(bytes: &[u8]) -> Result<Hoeg> {
    let doc: HoegJson = serde_json::from_slice(bytes)
        .map_err(|e| CliError::Parse(format!("malformed graph JSON: {e}")))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::Parse(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    let mut features = BTreeMap::new();
    for (ty, m) in &doc.features {
        features.insert(ty.clone(), m.to_matrix()?);
    }
    let mut edge_types = Vec::new();
    let mut adjacency = BTreeMap::new();
    for et in &doc.edge_types {
        let key = EdgeType {
            subject: et.subject.clone(),
            predicate: et.predicate.clone(),
            object: et.object.clone(),
        };
        edge_types.push(key.clone());
        adjacency.insert(key, et.edges.clone());
    }
    Ok(Hoeg {
        execution_id: doc.execution_id,
        node_types: doc.node_types,
        edge_types,
        features,
        adjacency,
        node_index: doc.node_index,
        targets: doc.targets,
        edge_features: BTreeMap::new(),
    })
}
