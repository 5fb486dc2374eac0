//! Adam optimization, the training loop with early stopping, the median
//! baseline, and evaluation metrics.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encode::Hoeg;
use crate::error::{CoreError, Result};
use crate::model::{
    backward_scaled, forward, graph_targets, loss, LossKind, ModelConfig, ModelParams,
    TypeSignature,
};

/// Adam with the default moment coefficients, state mirroring the parameter
/// layout.
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: ModelParams,
    v: ModelParams,
    step: u64,
}

impl Adam {
    pub fn new(params: &ModelParams, learning_rate: f64) -> Adam {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        let m_tensors = self.m.tensors_mut();
        let v_tensors = self.v.tensors_mut();
        let g_tensors = grads.tensors();
        let p_tensors = params.tensors_mut();
        for (((p, g), m), v) in p_tensors
            .into_iter()
            .zip(g_tensors)
            .zip(m_tensors)
            .zip(v_tensors)
        {
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

/// Outcome of one training run. Losses are in standardized target units;
/// train loss is the full-train-split MSE after each epoch, validation loss
/// the full-validation-split MAE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_losses: Vec<f64>,
    pub validation_losses: Vec<f64>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
    /// Split name -> (MAE, MSE) of the returned parameters.
    pub final_metrics: BTreeMap<String, (f64, f64)>,
}

/// A trained model or a constant baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predictor {
    Model { params: ModelParams, pooled: bool },
    Constant(f64),
}

impl Predictor {
    pub fn predict(&self, graph: &Hoeg) -> Result<Vec<f64>> {
        match self {
            Predictor::Model { params, pooled } => forward(graph, params, *pooled),
            Predictor::Constant(c) => {
                let n = graph_targets(graph, false).len();
                Ok(vec![*c; n.max(1)])
            }
        }
    }
}

/// The median of the training targets as a constant predictor; for an even
/// count, the mean of the two middle values.
pub fn median_baseline(train_targets: &[f64]) -> Result<Predictor> {
    if train_targets.is_empty() {
        return Err(CoreError::EmptyInput("median over no targets"));
    }
    let mut sorted = train_targets.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite targets"));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(Predictor::Constant(median))
}

/// MAE, MSE, and wall-clock prediction seconds of a predictor over the event
/// nodes (or pooled targets) of a set of graphs.
pub fn evaluate(predictor: &Predictor, graphs: &[&Hoeg], pooled: bool) -> Result<(f64, f64, f64)> {
    let started = Instant::now();
    let mut preds = Vec::new();
    let mut targets = Vec::new();
    for graph in graphs {
        let p = match predictor {
            Predictor::Model { params, .. } => forward(graph, params, pooled)?,
            Predictor::Constant(c) => vec![*c; graph_targets(graph, pooled).len()],
        };
        preds.extend(p);
        targets.extend(graph_targets(graph, pooled));
    }
    let secs = started.elapsed().as_secs_f64();
    let mae = loss(&preds, &targets, LossKind::Mae)?;
    let mse = loss(&preds, &targets, LossKind::Mse)?;
    Ok((mae, mse, secs))
}

/// Train with Adam over minibatches, batch loss averaged over all event
/// nodes (or samples) in the batch. Stops at `max_epochs` or after
/// `early_stop_patience` epochs without validation MAE improvement, and
/// returns the parameters of the best validation epoch. Deterministic given
/// `cfg.seed`.
pub fn train(
    train_graphs: &[&Hoeg],
    validation_graphs: &[&Hoeg],
    cfg: &ModelConfig,
) -> Result<(ModelParams, TrainReport)> {
    if train_graphs.is_empty() {
        return Err(CoreError::EmptyInput("empty training split"));
    }
    if validation_graphs.is_empty() && cfg.early_stop_patience.is_some() {
        return Err(CoreError::EmptyInput(
            "empty validation split with early stopping enabled",
        ));
    }

    let started = Instant::now();
    let signature = TypeSignature::of(train_graphs[0]);
    let mut params = ModelParams::init(&signature, cfg);
    let mut optimizer = Adam::new(&params, cfg.learning_rate);
    // Separate stream from the init seed so shuffles are independent of the
    // parameter draw.
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5DEECE66D);

    let mut best_params = params.clone();
    let mut best_epoch = 0usize;
    let mut best_val = f64::INFINITY;
    let mut epochs_without_improvement = 0usize;
    let mut train_losses = Vec::new();
    let mut validation_losses = Vec::new();

    for epoch in 1..=cfg.max_epochs {
        let mut order: Vec<usize> = (0..train_graphs.len()).collect();
        order.shuffle(&mut shuffle_rng);

        for batch in order.chunks(cfg.batch_size) {
            let total_targets: usize = batch
                .iter()
                .map(|&i| graph_targets(train_graphs[i], cfg.pooled).len())
                .sum();
            if total_targets == 0 {
                continue;
            }
            let scale = 1.0 / total_targets as f64;
            let mut batch_grads: Option<ModelParams> = None;
            for &i in batch {
                let graph = train_graphs[i];
                let targets = graph_targets(graph, cfg.pooled);
                if targets.is_empty() {
                    continue;
                }
                let (_, grads) =
                    backward_scaled(graph, &params, cfg.pooled, &targets, LossKind::Mse, scale)?;
                match &mut batch_grads {
                    None => batch_grads = Some(grads),
                    Some(acc) => accumulate(acc, &grads),
                }
            }
            if let Some(grads) = batch_grads {
                optimizer.step(&mut params, &grads);
            }
        }

        let predictor = Predictor::Model {
            params: params.clone(),
            pooled: cfg.pooled,
        };
        let (_, train_mse, _) = evaluate(&predictor, train_graphs, cfg.pooled)?;
        train_losses.push(train_mse);

        if validation_graphs.is_empty() {
            best_params = params.clone();
            best_epoch = epoch;
            continue;
        }
        let (val_mae, _, _) = evaluate(&predictor, validation_graphs, cfg.pooled)?;
        validation_losses.push(val_mae);

        if val_mae < best_val {
            best_val = val_mae;
            best_params = params.clone();
            best_epoch = epoch;
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement += 1;
            if let Some(patience) = cfg.early_stop_patience {
                if epochs_without_improvement >= patience {
                    break;
                }
            }
        }
    }

    let fit_seconds = started.elapsed().as_secs_f64();
    let report = TrainReport {
        train_losses,
        validation_losses,
        best_epoch,
        fit_seconds,
        predict_seconds: 0.0,
        final_metrics: BTreeMap::new(),
    };
    Ok((best_params, report))
}

fn accumulate(acc: &mut ModelParams, grads: &ModelParams) {
    for (a, g) in acc.tensors_mut().into_iter().zip(grads.tensors()) {
        for i in 0..a.len() {
            a[i] += g[i];
        }
    }
}
