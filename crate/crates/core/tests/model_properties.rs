//! Structural properties of the message-passing model: permutation
//! equivariance and the reduction of the heterogeneous model to the
//! homogeneous one when object-edge weights are zeroed.

use std::collections::BTreeMap;

use hoegkit_core::model::{forward, ModelConfig, ModelParams, TypeSignature};
use hoegkit_core::synth::random_toy_hoeg;
use hoegkit_core::{EdgeType, Hoeg, Matrix, EVENT_NODE_TYPE};

/// Permute the node order of one node type, remapping adjacency.
fn permute_node_type(graph: &Hoeg, ty: &str, perm: &[usize]) -> Hoeg {
    let mut out = graph.clone();
    let old = &graph.features[ty];
    let columns: Vec<Vec<f64>> = perm.iter().map(|&j| old.column(j)).collect();
    out.features.insert(
        ty.to_string(),
        Matrix::from_columns(old.rows(), &columns).unwrap(),
    );
    // perm[i] = old index now at new position i; invert for remapping.
    let mut inverse = vec![0usize; perm.len()];
    for (new, &old_idx) in perm.iter().enumerate() {
        inverse[old_idx] = new;
    }
    for (et, edges) in out.adjacency.iter_mut() {
        for (u, v) in edges.iter_mut() {
            if et.subject == ty {
                *u = inverse[*u as usize] as u32;
            }
            if et.object == ty {
                *v = inverse[*v as usize] as u32;
            }
        }
    }
    let index = out.node_index.get_mut(ty).unwrap();
    for slot in index.values_mut() {
        *slot = inverse[*slot];
    }
    if ty == EVENT_NODE_TYPE {
        let targets: Vec<f64> = perm.iter().map(|&j| graph.targets[j]).collect();
        out.targets = targets;
    }
    out
}

#[test]
fn permuting_event_nodes_permutes_predictions() {
    for seed in 0..10u64 {
        let graph = random_toy_hoeg(seed, 6, 2);
        let n = graph.features[EVENT_NODE_TYPE].cols();
        if n < 2 {
            continue;
        }
        let cfg = ModelConfig {
            hidden_dim: 8,
            seed: seed + 50,
            ..ModelConfig::default()
        };
        let params = ModelParams::init(&TypeSignature::of(&graph), &cfg);
        let base = forward(&graph, &params, false).unwrap();

        let perm: Vec<usize> = (0..n).rev().collect();
        let permuted = permute_node_type(&graph, EVENT_NODE_TYPE, &perm);
        let got = forward(&permuted, &params, false).unwrap();
        for (i, &j) in perm.iter().enumerate() {
            assert_eq!(got[i], base[j], "seed {seed}");
        }
    }
}

#[test]
fn permuting_object_nodes_leaves_predictions_unchanged() {
    for seed in 0..10u64 {
        let graph = random_toy_hoeg(seed + 100, 5, 3);
        let ty = match graph.node_types.iter().find(|t| *t != EVENT_NODE_TYPE) {
            Some(t) => t.clone(),
            None => continue,
        };
        let n = graph.features[&ty].cols();
        if n < 2 {
            continue;
        }
        let cfg = ModelConfig {
            hidden_dim: 8,
            seed,
            ..ModelConfig::default()
        };
        let params = ModelParams::init(&TypeSignature::of(&graph), &cfg);
        let base = forward(&graph, &params, false).unwrap();
        let perm: Vec<usize> = (0..n).rev().collect();
        let permuted = permute_node_type(&graph, &ty, &perm);
        assert_eq!(forward(&permuted, &params, false).unwrap(), base);
    }
}

/// Strip a toy HOEG down to its event part.
fn event_only_view(graph: &Hoeg) -> Hoeg {
    let mut features = BTreeMap::new();
    features.insert(
        EVENT_NODE_TYPE.to_string(),
        graph.features[EVENT_NODE_TYPE].clone(),
    );
    let mut adjacency = BTreeMap::new();
    adjacency.insert(
        EdgeType::follows(),
        graph.adjacency[&EdgeType::follows()].clone(),
    );
    let mut node_index = BTreeMap::new();
    node_index.insert(
        EVENT_NODE_TYPE.to_string(),
        graph.node_index[EVENT_NODE_TYPE].clone(),
    );
    Hoeg {
        execution_id: graph.execution_id.clone(),
        node_types: vec![EVENT_NODE_TYPE.to_string()],
        edge_types: vec![EdgeType::follows()],
        features,
        adjacency,
        node_index,
        targets: graph.targets.clone(),
        edge_features: BTreeMap::new(),
    }
}

/// Copy the event-path parameters of a heterogeneous model into a model
/// shaped for the event-only view.
fn event_path_params(hetero: &ModelParams, efg_template: &ModelParams) -> ModelParams {
    let mut out = efg_template.clone();
    out.input_proj.insert(
        EVENT_NODE_TYPE.to_string(),
        hetero.input_proj[EVENT_NODE_TYPE].clone(),
    );
    for (l, layer) in out.layers.iter_mut().enumerate() {
        layer.self_weights.insert(
            EVENT_NODE_TYPE.to_string(),
            hetero.layers[l].self_weights[EVENT_NODE_TYPE].clone(),
        );
        layer.edge_weights.insert(
            EdgeType::follows(),
            hetero.layers[l].edge_weights[&EdgeType::follows()].clone(),
        );
        layer.bias = hetero.layers[l].bias.clone();
        layer.prelu_slope = hetero.layers[l].prelu_slope;
    }
    out.head = hetero.head.clone();
    out
}

#[test]
fn zeroed_object_edges_reduce_to_event_only_predictions_bit_exactly() {
    for seed in 0..20u64 {
        let graph = random_toy_hoeg(seed + 300, 6, 3);
        let cfg = ModelConfig {
            hidden_dim: 8,
            seed: seed + 9,
            ..ModelConfig::default()
        };
        let mut hetero = ModelParams::init(&TypeSignature::of(&graph), &cfg);
        hetero.zero_object_edge_weights();

        let event_graph = event_only_view(&graph);
        let template = ModelParams::init(&TypeSignature::of(&event_graph), &cfg);
        let homogeneous = event_path_params(&hetero, &template);

        let hetero_preds = forward(&graph, &hetero, false).unwrap();
        let homo_preds = forward(&event_graph, &homogeneous, false).unwrap();
        assert_eq!(hetero_preds, homo_preds, "seed {seed}");
    }
}
