//! Synthetic data generators for property tests and sanity experiments:
//! randomized logs, randomized toy heterogeneous graphs, and a dataset whose
//! remaining time is an exact linear function of elapsed time.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encode::{EdgeType, Hoeg, EVENT_NODE_TYPE};
use crate::log::{AttributeValue, Event, EventLog, ObjectInstance, Timestamp};
use crate::matrix::Matrix;

/// A randomized event log: up to `max_objects` objects over up to three
/// types, up to `max_events` events each referencing one to four objects.
/// Always valid by construction.
pub fn random_log(seed: u64, max_objects: usize, max_events: usize) -> EventLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_types = rng.gen_range(1..=3usize);
    let types: Vec<String> = (0..n_types).map(|t| format!("type{t}")).collect();
    let n_objects = rng.gen_range(1..=max_objects.max(1));
    let objects: Vec<ObjectInstance> = (0..n_objects)
        .map(|i| ObjectInstance {
            id: format!("o{i:04}"),
            type_name: types[rng.gen_range(0..n_types)].clone(),
            attrs: BTreeMap::from([(
                "value".to_string(),
                AttributeValue::Number(rng.gen_range(-5.0..5.0)),
            )]),
        })
        .collect();

    let n_events = rng.gen_range(1..=max_events.max(1));
    let events: Vec<Event> = (0..n_events)
        .map(|i| {
            let k = rng.gen_range(1..=4usize.min(n_objects));
            let mut refs: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for _ in 0..k {
                let obj = &objects[rng.gen_range(0..n_objects)];
                let ids = refs.entry(obj.type_name.clone()).or_default();
                if !ids.contains(&obj.id) {
                    ids.push(obj.id.clone());
                }
            }
            Event {
                id: format!("e{i:04}"),
                activity: format!("act{}", rng.gen_range(0..5)),
                timestamp: Timestamp(i as i64 * 60_000 + rng.gen_range(0..1000)),
                attrs: BTreeMap::new(),
                refs,
            }
        })
        .collect();

    EventLog::new(events, objects).expect("generated log is valid")
}

/// A small randomized heterogeneous graph (built directly, bypassing a log)
/// for gradient checks: up to `max_events` event nodes, up to
/// `max_object_types` object types with one to three nodes each, random
/// forward follows edges and random interaction edges.
pub fn random_toy_hoeg(seed: u64, max_events: usize, max_object_types: usize) -> Hoeg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_events = rng.gen_range(1..=max_events.max(1));
    let n_types = rng.gen_range(1..=max_object_types.max(1));

    let mut node_types = vec![EVENT_NODE_TYPE.to_string()];
    let mut edge_types = vec![EdgeType::follows()];
    let mut features = BTreeMap::new();
    let mut adjacency = BTreeMap::new();
    let mut node_index = BTreeMap::new();

    let event_dim = rng.gen_range(1..=3usize);
    features.insert(
        EVENT_NODE_TYPE.to_string(),
        random_matrix(&mut rng, event_dim, n_events),
    );
    node_index.insert(
        EVENT_NODE_TYPE.to_string(),
        (0..n_events).map(|j| (format!("e{j}"), j)).collect(),
    );

    let mut follows = Vec::new();
    for i in 0..n_events {
        for j in (i + 1)..n_events {
            if rng.gen_bool(0.4) {
                follows.push((i as u32, j as u32));
            }
        }
    }
    adjacency.insert(EdgeType::follows(), follows);

    for t in 0..n_types {
        let ty = format!("type{t}");
        let n_nodes = rng.gen_range(1..=3usize);
        let dim = rng.gen_range(1..=2usize);
        features.insert(ty.clone(), random_matrix(&mut rng, dim, n_nodes));
        node_index.insert(
            ty.clone(),
            (0..n_nodes).map(|j| (format!("{ty}-o{j}"), j)).collect(),
        );
        let mut edges = Vec::new();
        for u in 0..n_nodes {
            for v in 0..n_events {
                if rng.gen_bool(0.5) {
                    edges.push((u as u32, v as u32));
                }
            }
        }
        adjacency.insert(EdgeType::interacts(&ty), edges);
        node_types.push(ty.clone());
        edge_types.push(EdgeType::interacts(&ty));
    }

    let targets = (0..n_events).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Hoeg {
        execution_id: format!("toy{seed}"),
        node_types,
        edge_types,
        features,
        adjacency,
        node_index,
        targets,
        edge_features: BTreeMap::new(),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.gen_range(-1.5..1.5)).collect(),
    )
    .expect("generated data matches shape")
}

/// A log of `n_executions` disjoint single-object chains, each spanning the
/// same total duration, so that every event's remaining time is exactly
/// `total_duration - elapsed`.
pub fn linear_synthetic_log(n_executions: usize, seed: u64) -> EventLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total_ms: i64 = 10 * 24 * 3600 * 1000;
    let mut events = Vec::new();
    let mut objects = Vec::new();
    for i in 0..n_executions {
        let oid = format!("case{i:04}");
        objects.push(ObjectInstance {
            id: oid.clone(),
            type_name: "case".to_string(),
            attrs: BTreeMap::new(),
        });
        let start = i as i64 * 2 * total_ms;
        let n_mid = rng.gen_range(1..=6usize);
        let mut offsets: Vec<i64> = (0..n_mid).map(|_| rng.gen_range(1..total_ms)).collect();
        offsets.push(0);
        offsets.push(total_ms);
        offsets.sort_unstable();
        offsets.dedup();
        for (j, off) in offsets.iter().enumerate() {
            events.push(Event {
                id: format!("e{i:04}-{j}"),
                activity: "step".to_string(),
                timestamp: Timestamp(start + off),
                attrs: BTreeMap::new(),
                refs: BTreeMap::from([("case".to_string(), vec![oid.clone()])]),
            });
        }
    }
    EventLog::new(events, objects).expect("generated log is valid")
}
