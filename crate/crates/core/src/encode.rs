//! Graph encodings of process executions.
//!
//! [`Efg`] is the homogeneous event-graph encoding: one node per event, a
//! feature column per event, directly-follows edges. [`Hoeg`] extends it with
//! one node type per object type and directed object -> event interaction
//! edges, leaving object attributes unaggregated.
//!
//! Feature matrices are oriented features x nodes; adjacency is a list of
//! (source index, target index) columns.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extraction::ProcessExecution;
use crate::features::{event_feature_vector, object_feature_vector, remaining_time};
use crate::features::{FeatureConfig, NormalizationStats};
use crate::log::EventLog;
use crate::matrix::Matrix;

pub const EVENT_NODE_TYPE: &str = "event";
pub const FOLLOWS_PREDICATE: &str = "follows";
pub const INTERACTS_PREDICATE: &str = "interacts";

/// A typed edge relation as a (subject, predicate, object) triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeType {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl EdgeType {
    pub fn follows() -> EdgeType {
        EdgeType {
            subject: EVENT_NODE_TYPE.to_string(),
            predicate: FOLLOWS_PREDICATE.to_string(),
            object: EVENT_NODE_TYPE.to_string(),
        }
    }

    pub fn interacts(object_type: &str) -> EdgeType {
        EdgeType {
            subject: object_type.to_string(),
            predicate: INTERACTS_PREDICATE.to_string(),
            object: EVENT_NODE_TYPE.to_string(),
        }
    }

    pub fn key(&self) -> String {
        format!("{}|{}|{}", self.subject, self.predicate, self.object)
    }
}

impl core::fmt::Display for EdgeType {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.predicate, self.object)
    }
}

/// Homogeneous event feature graph of one execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Efg {
    pub execution_id: String,
    /// feature_dim x event_count, one column per event in execution order.
    pub features: Matrix,
    /// Directly-follows edges as (source, target) column indices.
    pub adjacency: Vec<(u32, u32)>,
    /// Standardized remaining time per event node.
    pub targets: Vec<f64>,
    pub node_index: BTreeMap<String, usize>,
    /// Event ids in column order.
    pub event_order: Vec<String>,
}

/// Heterogeneous object event graph of one execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hoeg {
    pub execution_id: String,
    /// Node types, "event" first then object types sorted. All object types
    /// of the log appear, possibly with zero nodes, so every graph of a
    /// dataset shares one type signature.
    pub node_types: Vec<String>,
    pub edge_types: Vec<EdgeType>,
    /// Per node type: feature_dim x node_count.
    pub features: BTreeMap<String, Matrix>,
    /// Per edge type: (source, target) index columns.
    pub adjacency: BTreeMap<EdgeType, Vec<(u32, u32)>>,
    /// Per node type: entity id -> column index.
    pub node_index: BTreeMap<String, BTreeMap<String, usize>>,
    /// Standardized remaining time per event node.
    pub targets: Vec<f64>,
    /// Optional per-edge-type feature matrices; not populated by this
    /// encoder, carried for schema completeness.
    pub edge_features: BTreeMap<EdgeType, Matrix>,
}

impl Hoeg {
    pub fn event_count(&self) -> usize {
        self.features[EVENT_NODE_TYPE].cols()
    }
}

/// A chronological window of `len` consecutive events of a parent EFG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphSample {
    pub parent_execution_id: String,
    /// First event column index of the window.
    pub start: usize,
    pub len: usize,
    /// Standardized remaining time of the window's last event.
    pub target: f64,
}

/// Encode one execution as an EFG.
pub fn encode_efg(
    execution: &ProcessExecution,
    log: &EventLog,
    cfg: &FeatureConfig,
    stats: &NormalizationStats,
) -> Result<Efg> {
    let dim = cfg.event_feature_dim();
    let mut columns = Vec::with_capacity(execution.event_ids.len());
    let mut targets = Vec::with_capacity(execution.event_ids.len());
    let mut node_index = BTreeMap::new();
    for (j, eid) in execution.event_ids.iter().enumerate() {
        columns.push(event_feature_vector(execution, eid, log, cfg, stats)?);
        targets.push(
            stats
                .target
                .standardize(remaining_time(execution, eid, log)?),
        );
        node_index.insert(eid.clone(), j);
    }
    let adjacency = execution
        .edges
        .iter()
        .map(|(a, b)| (node_index[a] as u32, node_index[b] as u32))
        .collect();
    Ok(Efg {
        execution_id: execution.id.clone(),
        features: Matrix::from_columns(dim, &columns)?,
        adjacency,
        targets,
        node_index,
        event_order: execution.event_ids.clone(),
    })
}

/// Encode one execution as a HOEG. With `prefix` given, events after the
/// prefix event are dropped, along with objects only referenced later.
pub fn encode_hoeg(
    execution: &ProcessExecution,
    log: &EventLog,
    cfg: &FeatureConfig,
    stats: &NormalizationStats,
    prefix: Option<&str>,
) -> Result<Hoeg> {
    let execution = match prefix {
        Some(eid) => restrict_to_prefix(execution, eid, log)?,
        None => execution.clone(),
    };
    let efg = encode_efg(&execution, log, cfg, stats)?;

    let object_types = log.object_types();
    let mut node_types = vec![EVENT_NODE_TYPE.to_string()];
    node_types.extend(object_types.iter().cloned());

    let mut edge_types = vec![EdgeType::follows()];
    edge_types.extend(object_types.iter().map(|t| EdgeType::interacts(t)));

    let mut features = BTreeMap::new();
    let mut node_index = BTreeMap::new();
    let mut adjacency = BTreeMap::new();

    features.insert(EVENT_NODE_TYPE.to_string(), efg.features);
    node_index.insert(EVENT_NODE_TYPE.to_string(), efg.node_index.clone());
    adjacency.insert(EdgeType::follows(), efg.adjacency);

    for ty in &object_types {
        // Objects of this type that belong to the (possibly prefixed)
        // execution, in sorted id order.
        let members: Vec<&str> = execution
            .object_ids
            .iter()
            .map(String::as_str)
            .filter(|oid| log.object(oid).is_ok_and(|o| &o.type_name == ty))
            .collect();
        let index: BTreeMap<String, usize> = members
            .iter()
            .enumerate()
            .map(|(i, oid)| (oid.to_string(), i))
            .collect();

        let dim = cfg.object_feature_dim(ty);
        let columns: Vec<Vec<f64>> = members
            .iter()
            .map(|oid| object_feature_vector(log.object(oid)?, cfg, stats, false))
            .collect::<Result<_>>()?;
        features.insert(ty.clone(), Matrix::from_columns(dim, &columns)?);

        let mut edges = Vec::new();
        for (j, eid) in execution.event_ids.iter().enumerate() {
            let ev = log.event(eid)?;
            if let Some(refs) = ev.refs.get(ty) {
                let mut seen = BTreeSet::new();
                for oid in refs {
                    if let Some(&i) = index.get(oid) {
                        if seen.insert(i) {
                            edges.push((i as u32, j as u32));
                        }
                    }
                }
            }
        }
        adjacency.insert(EdgeType::interacts(ty), edges);
        node_index.insert(ty.clone(), index);
    }

    Ok(Hoeg {
        execution_id: execution.id.clone(),
        node_types,
        edge_types,
        features,
        adjacency,
        node_index,
        targets: efg.targets,
        edge_features: BTreeMap::new(),
    })
}

fn restrict_to_prefix(
    execution: &ProcessExecution,
    prefix: &str,
    log: &EventLog,
) -> Result<ProcessExecution> {
    let pos = execution
        .event_ids
        .iter()
        .position(|e| e == prefix)
        .ok_or_else(|| CoreError::EventNotInExecution {
            event: prefix.to_string(),
        })?;
    let event_ids: Vec<String> = execution.event_ids[..=pos].to_vec();
    let event_set: BTreeSet<&str> = event_ids.iter().map(String::as_str).collect();
    let edges = execution
        .edges
        .iter()
        .filter(|(a, b)| event_set.contains(a.as_str()) && event_set.contains(b.as_str()))
        .cloned()
        .collect();
    // Objects only referenced after the prefix are dropped.
    let mut object_ids = BTreeSet::new();
    for eid in &event_ids {
        for oid in log.event(eid)?.referenced_objects() {
            if execution.object_ids.contains(oid) {
                object_ids.insert(oid.to_string());
            }
        }
    }
    Ok(ProcessExecution {
        id: execution.id.clone(),
        object_ids,
        event_ids,
        edges,
    })
}

/// All chronological windows of `k` consecutive events: `max(0, n - k + 1)`
/// samples, each targeting the last event of the window.
pub fn subgraph_samples(efg: &Efg, k: usize) -> Vec<SubgraphSample> {
    let n = efg.event_order.len();
    if k == 0 || n < k {
        return Vec::new();
    }
    (0..=n - k)
        .map(|start| SubgraphSample {
            parent_execution_id: efg.execution_id.clone(),
            start,
            len: k,
            target: efg.targets[start + k - 1],
        })
        .collect()
}

/// Materialize a sample as a small EFG: the window's feature columns, edges
/// restricted to the window, and the sample target on every node (pooled
/// prediction uses the single sample target).
pub fn window_efg(efg: &Efg, sample: &SubgraphSample) -> Efg {
    let range = sample.start..sample.start + sample.len;
    let columns: Vec<Vec<f64>> = range.clone().map(|j| efg.features.column(j)).collect();
    let event_order: Vec<String> = efg.event_order[range.clone()].to_vec();
    let node_index: BTreeMap<String, usize> = event_order
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let adjacency: Vec<(u32, u32)> = efg
        .adjacency
        .iter()
        .filter(|(a, b)| range.contains(&(*a as usize)) && range.contains(&(*b as usize)))
        .map(|(a, b)| (a - sample.start as u32, b - sample.start as u32))
        .collect();
    Efg {
        execution_id: format!("{}#{}", sample.parent_execution_id, sample.start),
        features: Matrix::from_columns(efg.features.rows(), &columns)
            .expect("window columns share parent dimension"),
        adjacency,
        targets: vec![sample.target; sample.len],
        node_index,
        event_order,
    }
}

impl Efg {
    /// View this EFG as a single-node-type HOEG so the heterogeneous model
    /// runs one code path for both encodings.
    pub fn to_hoeg_view(&self) -> Hoeg {
        let mut features = BTreeMap::new();
        features.insert(EVENT_NODE_TYPE.to_string(), self.features.clone());
        let mut adjacency = BTreeMap::new();
        adjacency.insert(EdgeType::follows(), self.adjacency.clone());
        let mut node_index = BTreeMap::new();
        node_index.insert(EVENT_NODE_TYPE.to_string(), self.node_index.clone());
        Hoeg {
            execution_id: self.execution_id.clone(),
            node_types: vec![EVENT_NODE_TYPE.to_string()],
            edge_types: vec![EdgeType::follows()],
            features,
            adjacency,
            node_index,
            targets: self.targets.clone(),
            edge_features: BTreeMap::new(),
        }
    }
}

/// Tabular flattening of a list of EFGs: one row per event, columns are the
/// event features followed by the target. Row order is execution order, then
/// event order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn efg_to_table(efgs: &[Efg]) -> Table {
    let dim = efgs.first().map_or(0, |e| e.features.rows());
    let mut header: Vec<String> = (0..dim).map(|i| format!("f{i}")).collect();
    header.push("target".to_string());
    let mut rows = Vec::new();
    for efg in efgs {
        for j in 0..efg.event_order.len() {
            let mut row = efg.features.column(j);
            row.push(efg.targets[j]);
            rows.push(row);
        }
    }
    Table { header, rows }
}
