//! Heterogeneous message-passing regressor.
//!
//! Forward pass, per node v of type `nt`:
//!
//! ```text
//! h0_v = W_in[nt] x_v + b_in[nt]
//! h(l+1)_v = PReLU( W_self[l][nt] hl_v
//!                   + sum over edge types et ending at nt:
//!                       W_et[l] * sum_{u -> v via et} hl_u
//!                   + b[l] )
//! ```
//!
//! After the message-passing layers a linear head maps event-node states to
//! one prediction per event node, or, in pooled mode, to one prediction for
//! the mean event state. Neighbor aggregation is SUM. The PReLU slope is one
//! learnable scalar per layer. Gradients are analytic and checked against
//! central finite differences in the tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encode::{EdgeType, Hoeg, EVENT_NODE_TYPE};
use crate::error::{CoreError, Result};
use crate::matrix::Matrix;

/// Hyperparameters. Defaults follow the experiment configuration; the
/// tunable domains are enforced by [`ModelConfig::validate_domains`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub mp_layers: usize,
    pub post_layers: usize,
    pub dropout: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Early-stopping patience in epochs; `None` disables early stopping.
    pub early_stop_patience: Option<usize>,
    pub seed: u64,
    /// Graph-level prediction via mean pooling over event nodes.
    pub pooled: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden_dim: 24,
            learning_rate: 0.01,
            mp_layers: 2,
            post_layers: 1,
            dropout: 0.0,
            batch_size: 16,
            max_epochs: 30,
            early_stop_patience: Some(4),
            seed: 0,
            pooled: false,
        }
    }
}

pub const HIDDEN_DIM_DOMAIN: [usize; 8] = [8, 16, 24, 32, 48, 64, 128, 256];
pub const LEARNING_RATE_DOMAIN: [f64; 2] = [0.01, 0.001];

impl ModelConfig {
    /// Check the config against the fixed experiment domains.
    pub fn validate_domains(&self) -> Result<()> {
        let ok = HIDDEN_DIM_DOMAIN.contains(&self.hidden_dim)
            && LEARNING_RATE_DOMAIN
                .iter()
                .any(|lr| (*lr - self.learning_rate).abs() < 1e-15)
            && self.mp_layers == 2
            && self.post_layers == 1
            && self.dropout == 0.0
            && self.batch_size == 16
            && self.max_epochs == 30
            && self.early_stop_patience == Some(4);
        if ok {
            Ok(())
        } else {
            Err(CoreError::ShapeMismatch {
                context: "ModelConfig::validate_domains".to_string(),
                expected: "values within the experiment hyperparameter domains".to_string(),
                got: format!("{self:?}"),
            })
        }
    }
}

/// Node-type feature dimensions and edge types a model is shaped for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSignature {
    pub node_feature_dims: BTreeMap<String, usize>,
    pub edge_types: Vec<EdgeType>,
}

impl TypeSignature {
    pub fn of(graph: &Hoeg) -> TypeSignature {
        TypeSignature {
            node_feature_dims: graph
                .node_types
                .iter()
                .map(|nt| (nt.clone(), graph.features[nt].rows()))
                .collect(),
            edge_types: graph.edge_types.clone(),
        }
    }
}

/// A linear map: `weight * x + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub self_weights: BTreeMap<String, Matrix>,
    pub edge_weights: BTreeMap<EdgeType, Matrix>,
    pub bias: Vec<f64>,
    pub prelu_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub input_proj: BTreeMap<String, Dense>,
    pub layers: Vec<LayerParams>,
    pub head: Dense,
}

fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("generated data matches shape")
}

impl ModelParams {
    /// Seeded initialization: weights uniform in +-sqrt(6/(fan_in+fan_out)),
    /// biases zero, PReLU slopes 0.25.
    pub fn init(signature: &TypeSignature, cfg: &ModelConfig) -> ModelParams {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let h = cfg.hidden_dim;
        let input_proj = signature
            .node_feature_dims
            .iter()
            .map(|(nt, &d)| {
                (
                    nt.clone(),
                    Dense {
                        weight: glorot(h, d, &mut rng),
                        bias: vec![0.0; h],
                    },
                )
            })
            .collect();
        let layers = (0..cfg.mp_layers)
            .map(|_| LayerParams {
                self_weights: signature
                    .node_feature_dims
                    .keys()
                    .map(|nt| (nt.clone(), glorot(h, h, &mut rng)))
                    .collect(),
                edge_weights: signature
                    .edge_types
                    .iter()
                    .map(|et| (et.clone(), glorot(h, h, &mut rng)))
                    .collect(),
                bias: vec![0.0; h],
                prelu_slope: 0.25,
            })
            .collect();
        let head = Dense {
            weight: glorot(1, h, &mut rng),
            bias: vec![0.0],
        };
        ModelParams {
            input_proj,
            layers,
            head,
        }
    }

    /// A same-shaped parameter set with every entry zero.
    pub fn zeros_like(&self) -> ModelParams {
        let mut out = self.clone();
        for t in out.tensors_mut() {
            for v in t {
                *v = 0.0;
            }
        }
        out
    }

    /// All parameter tensors as mutable slices, in a fixed deterministic
    /// order shared with [`ModelParams::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for dense in self.input_proj.values_mut() {
            out.push(dense.weight.data_mut());
            out.push(&mut dense.bias);
        }
        for layer in &mut self.layers {
            for w in layer.self_weights.values_mut() {
                out.push(w.data_mut());
            }
            for w in layer.edge_weights.values_mut() {
                out.push(w.data_mut());
            }
            out.push(&mut layer.bias);
            out.push(core::slice::from_mut(&mut layer.prelu_slope));
        }
        out.push(self.head.weight.data_mut());
        out.push(&mut self.head.bias);
        out
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for dense in self.input_proj.values() {
            out.push(dense.weight.data());
            out.push(&dense.bias);
        }
        for layer in &self.layers {
            for w in layer.self_weights.values() {
                out.push(w.data());
            }
            for w in layer.edge_weights.values() {
                out.push(w.data());
            }
            out.push(&layer.bias);
            out.push(core::slice::from_ref(&layer.prelu_slope));
        }
        out.push(self.head.weight.data());
        out.push(&self.head.bias);
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Zero every edge weight whose subject is not the event node type, in
    /// every layer. With shared event-path weights this reduces the model to
    /// its homogeneous counterpart.
    pub fn zero_object_edge_weights(&mut self) {
        for layer in &mut self.layers {
            for (et, w) in layer.edge_weights.iter_mut() {
                if et.subject != EVENT_NODE_TYPE {
                    for v in w.data_mut() {
                        *v = 0.0;
                    }
                }
            }
        }
    }
}

/// Cached intermediate states of one forward pass.
pub struct ForwardTrace {
    /// `h[0]` is the post-projection state; `h[l+1]` the output of layer `l`.
    pub h: Vec<BTreeMap<String, Matrix>>,
    /// Pre-activations of each layer.
    pub z: Vec<BTreeMap<String, Matrix>>,
    /// Summed neighbor states per layer and edge type.
    pub agg: Vec<BTreeMap<EdgeType, Matrix>>,
    pub predictions: Vec<f64>,
}

fn check_shapes(graph: &Hoeg, params: &ModelParams) -> Result<()> {
    for nt in &graph.node_types {
        let proj = params
            .input_proj
            .get(nt)
            .ok_or_else(|| CoreError::ShapeMismatch {
                context: "forward".to_string(),
                expected: format!("input projection for node type {nt}"),
                got: "missing".to_string(),
            })?;
        let d = graph.features[nt].rows();
        if proj.weight.cols() != d {
            return Err(CoreError::ShapeMismatch {
                context: format!("input projection for node type {nt}"),
                expected: format!("{} input features", proj.weight.cols()),
                got: format!("{d}"),
            });
        }
    }
    for et in &graph.edge_types {
        for layer in &params.layers {
            if !layer.edge_weights.contains_key(et) {
                return Err(CoreError::ShapeMismatch {
                    context: "forward".to_string(),
                    expected: format!("edge weight for {et}"),
                    got: "missing".to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Forward pass retaining every intermediate needed by the backward pass.
pub fn forward_trace(graph: &Hoeg, params: &ModelParams, pooled: bool) -> Result<ForwardTrace> {
    check_shapes(graph, params)?;
    let mut h: Vec<BTreeMap<String, Matrix>> = Vec::with_capacity(params.layers.len() + 1);
    let mut zs = Vec::with_capacity(params.layers.len());
    let mut aggs = Vec::with_capacity(params.layers.len());

    let mut h0 = BTreeMap::new();
    for nt in &graph.node_types {
        let proj = &params.input_proj[nt];
        let mut state = proj.weight.matmul(&graph.features[nt])?;
        state.add_column_broadcast(&proj.bias)?;
        h0.insert(nt.clone(), state);
    }
    h.push(h0);

    for layer in &params.layers {
        let prev = h.last().unwrap();
        let mut agg: BTreeMap<EdgeType, Matrix> = BTreeMap::new();
        for et in &graph.edge_types {
            let hidden = prev[&et.subject].rows();
            let mut m = Matrix::zeros(hidden, prev[&et.object].cols());
            for &(u, v) in &graph.adjacency[et] {
                for i in 0..hidden {
                    m.add_to(i, v as usize, prev[&et.subject].get(i, u as usize));
                }
            }
            agg.insert(et.clone(), m);
        }

        let mut z: BTreeMap<String, Matrix> = BTreeMap::new();
        let mut next: BTreeMap<String, Matrix> = BTreeMap::new();
        for nt in &graph.node_types {
            let mut pre = layer.self_weights[nt].matmul(&prev[nt])?;
            pre.add_column_broadcast(&layer.bias)?;
            for et in &graph.edge_types {
                if &et.object == nt {
                    pre.add_assign(&layer.edge_weights[et].matmul(&agg[et])?)?;
                }
            }
            let mut act = pre.clone();
            for v in act.data_mut() {
                if *v < 0.0 {
                    *v *= layer.prelu_slope;
                }
            }
            z.insert(nt.clone(), pre);
            next.insert(nt.clone(), act);
        }
        zs.push(z);
        aggs.push(agg);
        h.push(next);
    }

    let event_state = &h.last().unwrap()[EVENT_NODE_TYPE];
    let n = event_state.cols();
    let predictions = if pooled {
        if n == 0 {
            return Err(CoreError::EmptyInput(
                "pooled forward over zero event nodes",
            ));
        }
        let mut acc = 0.0;
        for j in 0..n {
            let mut dot = params.head.bias[0];
            for i in 0..event_state.rows() {
                dot += params.head.weight.get(0, i) * event_state.get(i, j);
            }
            acc += dot;
        }
        // Mean pooling commutes with the linear head; applying the head per
        // column keeps the arithmetic shared with node-level mode.
        vec![acc / n as f64]
    } else {
        (0..n)
            .map(|j| {
                let mut dot = params.head.bias[0];
                for i in 0..event_state.rows() {
                    dot += params.head.weight.get(0, i) * event_state.get(i, j);
                }
                dot
            })
            .collect()
    };

    Ok(ForwardTrace {
        h,
        z: zs,
        agg: aggs,
        predictions,
    })
}

/// Predictions over event nodes (node-level mode) or one pooled prediction.
pub fn forward(graph: &Hoeg, params: &ModelParams, pooled: bool) -> Result<Vec<f64>> {
    Ok(forward_trace(graph, params, pooled)?.predictions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    Mae,
    Mse,
}

/// Mean absolute or mean squared error over equal-length vectors.
pub fn loss(predictions: &[f64], targets: &[f64], kind: LossKind) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != targets.len() {
        return Err(CoreError::ShapeMismatch {
            context: "loss".to_string(),
            expected: format!("{} non-empty predictions", targets.len()),
            got: format!("{}", predictions.len()),
        });
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| match kind {
            LossKind::Mae => (p - t).abs(),
            LossKind::Mse => (p - t) * (p - t),
        })
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// Gradients of `scale * sum_i loss_term(p_i, t_i)` with respect to every
/// parameter, plus the unscaled loss-term sum. Node-level mode targets the
/// graph's per-event targets; pooled mode targets the single sample target.
pub fn backward_scaled(
    graph: &Hoeg,
    params: &ModelParams,
    pooled: bool,
    targets: &[f64],
    kind: LossKind,
    scale: f64,
) -> Result<(f64, ModelParams)> {
    let trace = forward_trace(graph, params, pooled)?;
    let preds = &trace.predictions;
    if preds.len() != targets.len() {
        return Err(CoreError::ShapeMismatch {
            context: "backward targets".to_string(),
            expected: format!("{} targets", preds.len()),
            got: format!("{}", targets.len()),
        });
    }

    let mut loss_sum = 0.0;
    let mut dpred = vec![0.0; preds.len()];
    for (i, (p, t)) in preds.iter().zip(targets).enumerate() {
        let r = p - t;
        match kind {
            LossKind::Mae => {
                loss_sum += r.abs();
                dpred[i] = scale * r.signum() * if r == 0.0 { 0.0 } else { 1.0 };
            }
            LossKind::Mse => {
                loss_sum += r * r;
                dpred[i] = scale * 2.0 * r;
            }
        }
    }

    let mut grads = params.zeros_like();
    let hidden = params.head.weight.cols();
    let last = trace.h.last().unwrap();
    let event_state = &last[EVENT_NODE_TYPE];
    let n_events = event_state.cols();

    // Head backward, producing the gradient w.r.t. the final event state.
    let mut d_h: BTreeMap<String, Matrix> = graph
        .node_types
        .iter()
        .map(|nt| (nt.clone(), Matrix::zeros(hidden, last[nt].cols())))
        .collect();
    {
        let d_event = d_h.get_mut(EVENT_NODE_TYPE).unwrap();
        if pooled {
            let g = dpred[0] / n_events as f64;
            grads.head.bias[0] += dpred[0];
            for j in 0..n_events {
                for i in 0..hidden {
                    grads.head.weight.add_to(0, i, g * event_state.get(i, j));
                    d_event.add_to(i, j, g * params.head.weight.get(0, i));
                }
            }
        } else {
            for (j, &d) in dpred.iter().take(n_events).enumerate() {
                grads.head.bias[0] += d;
                for i in 0..hidden {
                    grads.head.weight.add_to(0, i, d * event_state.get(i, j));
                    d_event.add_to(i, j, dpred[j] * params.head.weight.get(0, i));
                }
            }
        }
    }

    // Message-passing layers in reverse.
    for l in (0..params.layers.len()).rev() {
        let layer = &params.layers[l];
        let layer_grad = &mut grads.layers[l];
        let prev = &trace.h[l];
        let z = &trace.z[l];
        let agg = &trace.agg[l];

        // PReLU backward: d_z from d_h, plus the slope gradient.
        let mut d_z: BTreeMap<String, Matrix> = BTreeMap::new();
        for nt in &graph.node_types {
            let mut dz = d_h[nt].clone();
            let zm = &z[nt];
            let mut dslope = 0.0;
            for i in 0..dz.rows() {
                for j in 0..dz.cols() {
                    let zv = zm.get(i, j);
                    if zv < 0.0 {
                        dslope += dz.get(i, j) * zv;
                        dz.set(i, j, dz.get(i, j) * layer.prelu_slope);
                    }
                }
            }
            layer_grad.prelu_slope += dslope;
            d_z.insert(nt.clone(), dz);
        }

        let mut d_prev: BTreeMap<String, Matrix> = graph
            .node_types
            .iter()
            .map(|nt| (nt.clone(), Matrix::zeros(hidden, prev[nt].cols())))
            .collect();

        for nt in &graph.node_types {
            let dz = &d_z[nt];
            // Bias: shared across node types within the layer.
            for i in 0..dz.rows() {
                for j in 0..dz.cols() {
                    layer_grad.bias[i] += dz.get(i, j);
                }
            }
            // Self path.
            layer_grad
                .self_weights
                .get_mut(nt)
                .unwrap()
                .add_assign(&dz.matmul_transpose_other(&prev[nt])?)?;
            d_prev
                .get_mut(nt)
                .unwrap()
                .add_assign(&layer.self_weights[nt].matmul_transpose_self(dz)?)?;
        }

        // Message paths.
        for et in &graph.edge_types {
            let dz = &d_z[&et.object];
            layer_grad
                .edge_weights
                .get_mut(et)
                .unwrap()
                .add_assign(&dz.matmul_transpose_other(&agg[et])?)?;
            let d_agg = layer.edge_weights[et].matmul_transpose_self(dz)?;
            let d_src = d_prev.get_mut(&et.subject).unwrap();
            for &(u, v) in &graph.adjacency[et] {
                for i in 0..hidden {
                    d_src.add_to(i, u as usize, d_agg.get(i, v as usize));
                }
            }
        }

        d_h = d_prev;
    }

    // Input projections.
    for nt in &graph.node_types {
        let dh0 = &d_h[nt];
        let proj_grad = grads.input_proj.get_mut(nt).unwrap();
        proj_grad
            .weight
            .add_assign(&dh0.matmul_transpose_other(&graph.features[nt])?)?;
        for i in 0..dh0.rows() {
            for j in 0..dh0.cols() {
                proj_grad.bias[i] += dh0.get(i, j);
            }
        }
    }

    Ok((loss_sum, grads))
}

/// Gradient of the per-graph mean loss.
pub fn backward(
    graph: &Hoeg,
    params: &ModelParams,
    pooled: bool,
    kind: LossKind,
) -> Result<(f64, ModelParams)> {
    let targets = graph_targets(graph, pooled);
    let n = targets.len().max(1) as f64;
    let (loss_sum, grads) = backward_scaled(graph, params, pooled, &targets, kind, 1.0 / n)?;
    Ok((loss_sum / n, grads))
}

/// The training targets of a graph: per event node, or the single sample
/// target in pooled mode.
pub fn graph_targets(graph: &Hoeg, pooled: bool) -> Vec<f64> {
    if pooled {
        graph.targets.last().copied().into_iter().collect()
    } else {
        graph.targets.clone()
    }
}
