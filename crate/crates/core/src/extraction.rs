//! Object graph construction and process-execution extraction.
//!
//! Two extraction strategies are supported: one execution per connected
//! component of the object graph, and one execution per object of a chosen
//! leading type with the remaining objects assigned to their nearest leading
//! object.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::log::EventLog;

/// Undirected graph over objects; an edge connects two distinct objects that
/// are co-referenced by at least one event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectGraph {
    pub nodes: BTreeSet<String>,
    /// Edges stored with endpoints in ascending order.
    pub edges: BTreeSet<(String, String)>,
}

impl ObjectGraph {
    pub fn neighbors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a str> {
        // Adjacency is small enough per fixture tests; callers needing bulk
        // traversal should use `adjacency()`.
        self.edges.iter().filter_map(move |(a, b)| {
            if a == node {
                Some(b.as_str())
            } else if b == node {
                Some(a.as_str())
            } else {
                None
            }
        })
    }

    /// Adjacency lists keyed by object id.
    pub fn adjacency(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut adj: BTreeMap<&str, Vec<&str>> = self
            .nodes
            .iter()
            .map(|n| (n.as_str(), Vec::new()))
            .collect();
        for (a, b) in &self.edges {
            adj.get_mut(a.as_str()).unwrap().push(b);
            adj.get_mut(b.as_str()).unwrap().push(a);
        }
        adj
    }
}

/// A process execution: the directed event graph induced by a set of objects.
///
/// `event_ids` are in log order; `edges` is the directly-follows relation
/// restricted to the execution's events, so every edge points strictly
/// forward in the `(timestamp, id)` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessExecution {
    /// Stable identifier: the first event id (connected components) or the
    /// leading object id (leading-type extraction).
    pub id: String,
    pub object_ids: BTreeSet<String>,
    pub event_ids: Vec<String>,
    pub edges: BTreeSet<(String, String)>,
}

impl ProcessExecution {
    pub fn contains_event(&self, event_id: &str) -> bool {
        self.event_ids.iter().any(|e| e == event_id)
    }
}

/// How process executions are carved out of a log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractionStrategy {
    ConnectedComponents,
    LeadingType(String),
}

pub fn build_object_graph(log: &EventLog) -> ObjectGraph {
    let nodes: BTreeSet<String> = log.objects().keys().cloned().collect();
    let mut edges = BTreeSet::new();
    for ev in log.events() {
        let objs: Vec<&str> = {
            let mut v: Vec<&str> = ev.referenced_objects().collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        for i in 0..objs.len() {
            for j in (i + 1)..objs.len() {
                edges.insert((objs[i].to_string(), objs[j].to_string()));
            }
        }
    }
    ObjectGraph { nodes, edges }
}

/// Union-find over object indices; near-linear on large logs.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// One process execution per connected component of the object graph,
/// ordered by earliest event `(timestamp, id)`.
pub fn extract_connected_components(log: &EventLog) -> Vec<ProcessExecution> {
    let object_ids: Vec<&String> = log.objects().keys().collect();
    let index: BTreeMap<&str, usize> = object_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let mut uf = UnionFind::new(object_ids.len());
    for ev in log.events() {
        let mut prev: Option<usize> = None;
        for oid in ev.referenced_objects() {
            let i = index[oid];
            if let Some(p) = prev {
                uf.union(p, i);
            }
            prev = Some(i);
        }
    }

    let mut components: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, oid) in object_ids.iter().enumerate() {
        components
            .entry(uf.find(i))
            .or_default()
            .insert((*oid).clone());
    }

    let mut executions: Vec<ProcessExecution> = components
        .into_values()
        .map(|objects| execution_for_objects(log, objects, None))
        // components of never-referenced objects have no events and are not
        // process executions
        .filter(|ex| !ex.event_ids.is_empty())
        .collect();
    sort_executions(log, &mut executions);
    executions
}

/// One execution per object of `leading` type. Every non-leading object is
/// assigned to the execution of its nearest leading object in the object
/// graph (ties broken by smallest leading object id); unreachable objects are
/// assigned to none.
pub fn extract_leading_type(log: &EventLog, leading: &str) -> Result<Vec<ProcessExecution>> {
    if !log.object_types().iter().any(|t| t == leading) {
        return Err(CoreError::UnknownObjectType(leading.to_string()));
    }
    let graph = build_object_graph(log);
    let adj = graph.adjacency();

    let seeds: Vec<String> = log
        .objects_of_type(leading)
        .iter()
        .map(|o| o.id.clone())
        .collect();

    // Level-synchronous multi-source BFS. A node settled at distance d keeps
    // the smallest leading id among all distance-d offers.
    let mut assigned: BTreeMap<&str, &str> = BTreeMap::new();
    let mut frontier: VecDeque<&str> = VecDeque::new();
    for seed in &seeds {
        assigned.insert(seed.as_str(), seed.as_str());
        frontier.push_back(seed.as_str());
    }
    while !frontier.is_empty() {
        let mut offers: BTreeMap<&str, &str> = BTreeMap::new();
        for node in frontier.drain(..) {
            let lead = assigned[node];
            for &nb in &adj[node] {
                if assigned.contains_key(nb) {
                    continue;
                }
                offers
                    .entry(nb)
                    .and_modify(|best| {
                        if lead < *best {
                            *best = lead;
                        }
                    })
                    .or_insert(lead);
            }
        }
        for (node, lead) in offers {
            assigned.insert(node, lead);
            frontier.push_back(node);
        }
    }

    let mut per_seed: BTreeMap<&str, BTreeSet<String>> = seeds
        .iter()
        .map(|s| (s.as_str(), BTreeSet::new()))
        .collect();
    for (node, lead) in &assigned {
        per_seed.get_mut(lead).unwrap().insert((*node).to_string());
    }

    let mut executions: Vec<ProcessExecution> = per_seed
        .into_iter()
        .map(|(seed, objects)| execution_for_objects(log, objects, Some(seed.to_string())))
        .filter(|ex| !ex.event_ids.is_empty())
        .collect();
    sort_executions(log, &mut executions);
    Ok(executions)
}

pub fn extract(log: &EventLog, strategy: &ExtractionStrategy) -> Result<Vec<ProcessExecution>> {
    match strategy {
        ExtractionStrategy::ConnectedComponents => Ok(extract_connected_components(log)),
        ExtractionStrategy::LeadingType(ty) => extract_leading_type(log, ty),
    }
}

pub fn count_cases(log: &EventLog, strategy: &ExtractionStrategy) -> Result<usize> {
    Ok(extract(log, strategy)?.len())
}

fn execution_for_objects(
    log: &EventLog,
    objects: BTreeSet<String>,
    id: Option<String>,
) -> ProcessExecution {
    let mut event_ids: Vec<String> = Vec::new();
    for ev in log.events() {
        if ev.referenced_objects().any(|oid| objects.contains(oid)) {
            event_ids.push(ev.id.clone());
        }
    }
    let event_set: BTreeSet<&str> = event_ids.iter().map(String::as_str).collect();
    let edges = log
        .directly_follows()
        .into_iter()
        .filter(|(a, b)| event_set.contains(a.as_str()) && event_set.contains(b.as_str()))
        .collect();
    let id = id.unwrap_or_else(|| event_ids.first().cloned().unwrap_or_default());
    ProcessExecution {
        id,
        object_ids: objects,
        event_ids,
        edges,
    }
}

fn sort_executions(log: &EventLog, executions: &mut [ProcessExecution]) {
    executions.sort_by_key(|ex| {
        ex.event_ids
            .first()
            .map(|e| {
                let ev = log.event(e).expect("execution event exists in log");
                (ev.timestamp, ev.id.clone())
            })
            .unwrap_or((crate::log::Timestamp(i64::MAX), String::new()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::{Event, ObjectInstance, Timestamp};
    use std::collections::BTreeMap;

    fn ev(id: &str, ts: i64, refs: &[(&str, &[&str])]) -> Event {
        Event {
            id: id.to_string(),
            activity: "a".to_string(),
            timestamp: Timestamp(ts),
            attrs: BTreeMap::new(),
            refs: refs
                .iter()
                .map(|(ty, ids)| (ty.to_string(), ids.iter().map(|s| s.to_string()).collect()))
                .collect(),
        }
    }

    fn obj(id: &str, ty: &str) -> ObjectInstance {
        ObjectInstance {
            id: id.to_string(),
            type_name: ty.to_string(),
            attrs: BTreeMap::new(),
        }
    }

    fn two_component_log() -> EventLog {
        EventLog::new(
            vec![
                ev("e1", 1, &[("t", &["x", "y"])]),
                ev("e2", 2, &[("t", &["y"])]),
                ev("e3", 3, &[("t", &["z"])]),
            ],
            vec![obj("x", "t"), obj("y", "t"), obj("z", "t")],
        )
        .unwrap()
    }

    #[test]
    fn object_graph_has_no_self_loops_and_pairs_cooccur() {
        let log = two_component_log();
        let g = build_object_graph(&log);
        assert_eq!(g.edges.len(), 1);
        assert!(g.edges.contains(&("x".to_string(), "y".to_string())));
    }

    #[test]
    fn connected_components_partition_objects_and_events() {
        let log = two_component_log();
        let execs = extract_connected_components(&log);
        assert_eq!(execs.len(), 2);
        assert_eq!(execs[0].event_ids, ["e1", "e2"]);
        assert_eq!(execs[1].event_ids, ["e3"]);
        // Edge within the first execution only.
        assert_eq!(
            execs[0].edges,
            [("e1".to_string(), "e2".to_string())].into_iter().collect()
        );
        let all_objects: BTreeSet<_> = execs
            .iter()
            .flat_map(|e| e.object_ids.iter().cloned())
            .collect();
        assert_eq!(all_objects.len(), 3);
    }

    #[test]
    fn leading_type_one_execution_per_leading_object() {
        let log = two_component_log();
        let execs = extract_leading_type(&log, "t").unwrap();
        assert_eq!(execs.len(), 3);
    }

    #[test]
    fn leading_type_unknown_type_errors() {
        let log = two_component_log();
        assert!(matches!(
            extract_leading_type(&log, "nope"),
            Err(CoreError::UnknownObjectType(_))
        ));
    }

    #[test]
    fn leading_type_nearest_with_id_tiebreak() {
        // y is adjacent to both leads x and z; "x" < "z" wins the tie.
        let log = EventLog::new(
            vec![
                ev("e1", 1, &[("lead", &["x"]), ("other", &["y"])]),
                ev("e2", 2, &[("lead", &["z"]), ("other", &["y"])]),
            ],
            vec![obj("x", "lead"), obj("z", "lead"), obj("y", "other")],
        )
        .unwrap();
        let execs = extract_leading_type(&log, "lead").unwrap();
        let x_exec = execs.iter().find(|e| e.id == "x").unwrap();
        let z_exec = execs.iter().find(|e| e.id == "z").unwrap();
        assert!(x_exec.object_ids.contains("y"));
        assert!(!z_exec.object_ids.contains("y"));
    }

    #[test]
    fn edges_point_forward_in_log_order() {
        let log = two_component_log();
        for ex in extract_connected_components(&log) {
            let pos: BTreeMap<&str, usize> = ex
                .event_ids
                .iter()
                .enumerate()
                .map(|(i, e)| (e.as_str(), i))
                .collect();
            for (a, b) in &ex.edges {
                assert!(pos[a.as_str()] < pos[b.as_str()]);
            }
        }
    }
}
