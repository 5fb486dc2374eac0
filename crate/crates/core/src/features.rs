//! Event and object feature computation, the remaining-time target,
//! train-split z-score normalization, and split assignment.
//!
//! Concrete feature definitions, pinned here and by the tests:
//! - activity one-hot over the training vocabulary plus one reserved
//!   "unknown" slot,
//! - elapsed seconds since the execution's first event,
//! - seconds since the immediately preceding event in the execution's
//!   `(timestamp, id)` order (0 for the first event),
//! - count of distinct object types referenced by strictly preceding events
//!   of the execution,
//! - standardized numeric event attributes.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extraction::ProcessExecution;
use crate::log::{AttributeValue, EventLog, ObjectInstance};

/// Mean and population standard deviation of one scalar feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn destandardize(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Population mean/std with the degenerate-spread fallback std = 1.0.
pub fn mean_std(values: &[f64]) -> Result<MeanStd> {
    if values.is_empty() {
        return Err(CoreError::EmptyInput("mean_std over no values"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    Ok(MeanStd {
        mean,
        std: if std < 1e-12 { 1.0 } else { std },
    })
}

/// Which event features are active and the categorical vocabularies, fitted
/// on the training split only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub activity_onehot: bool,
    pub elapsed_seconds: bool,
    pub previous_event_delta: bool,
    pub previous_object_type_count: bool,
    pub numeric_event_attrs: bool,
    /// Training-split activity vocabulary, ordered. Activities outside it map
    /// to a reserved trailing "unknown" slot.
    pub activity_vocab: Vec<String>,
    /// Numeric event attribute names, ordered.
    pub numeric_event_attr_names: Vec<String>,
    /// Per object type: numeric attribute names, ordered.
    pub object_numeric_attrs: BTreeMap<String, Vec<String>>,
    /// Per object type: categorical attribute name -> ordered category list.
    pub object_categorical_vocabs: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

/// Feature-set switches for [`FeatureConfig::fit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureFlags {
    pub activity_onehot: bool,
    pub elapsed_seconds: bool,
    pub previous_event_delta: bool,
    pub previous_object_type_count: bool,
    pub numeric_event_attrs: bool,
}

impl Default for FeatureFlags {
    fn default() -> Self {
        FeatureFlags {
            activity_onehot: true,
            elapsed_seconds: true,
            previous_event_delta: true,
            previous_object_type_count: true,
            numeric_event_attrs: true,
        }
    }
}

pub const ELAPSED_FEATURE: &str = "elapsed_seconds";
pub const DELTA_FEATURE: &str = "previous_event_delta";

impl FeatureConfig {
    /// Build vocabularies and attribute lists from the training executions
    /// only. Object attribute schemas come from the whole log (they are type
    /// metadata, not statistics), while category vocabularies are restricted
    /// to objects appearing in training executions.
    pub fn fit(log: &EventLog, train: &[&ProcessExecution], flags: FeatureFlags) -> FeatureConfig {
        let mut activity_vocab: BTreeSet<String> = BTreeSet::new();
        let mut numeric_event_attr_names: BTreeSet<String> = BTreeSet::new();
        let mut train_objects: BTreeSet<&str> = BTreeSet::new();
        for ex in train {
            for eid in &ex.event_ids {
                let ev = log.event(eid).expect("train event in log");
                activity_vocab.insert(ev.activity.clone());
                for (name, value) in &ev.attrs {
                    if matches!(value, AttributeValue::Number(_)) {
                        numeric_event_attr_names.insert(name.clone());
                    }
                }
            }
            train_objects.extend(ex.object_ids.iter().map(String::as_str));
        }

        let mut object_numeric_attrs: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut object_categorical_vocabs: BTreeMap<String, BTreeMap<String, Vec<String>>> =
            BTreeMap::new();
        for ty in log.object_types() {
            let mut numeric: BTreeSet<String> = BTreeSet::new();
            let mut categorical: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
            for obj in log.objects_of_type(&ty) {
                for (name, value) in &obj.attrs {
                    match value {
                        AttributeValue::Number(_) => {
                            numeric.insert(name.clone());
                        }
                        AttributeValue::Category(c) => {
                            let vocab = categorical.entry(name.clone()).or_default();
                            if train_objects.contains(obj.id.as_str()) {
                                vocab.insert(c.clone());
                            }
                        }
                        AttributeValue::Timestamp(_) => {}
                    }
                }
            }
            object_numeric_attrs.insert(ty.clone(), numeric.into_iter().collect());
            object_categorical_vocabs.insert(
                ty.clone(),
                categorical
                    .into_iter()
                    .map(|(k, v)| (k, v.into_iter().collect()))
                    .collect(),
            );
        }

        FeatureConfig {
            activity_onehot: flags.activity_onehot,
            elapsed_seconds: flags.elapsed_seconds,
            previous_event_delta: flags.previous_event_delta,
            previous_object_type_count: flags.previous_object_type_count,
            numeric_event_attrs: flags.numeric_event_attrs,
            activity_vocab: activity_vocab.into_iter().collect(),
            numeric_event_attr_names: numeric_event_attr_names.into_iter().collect(),
            object_numeric_attrs,
            object_categorical_vocabs,
        }
    }

    /// Length of every event feature vector under this config.
    pub fn event_feature_dim(&self) -> usize {
        let mut d = 0;
        if self.activity_onehot {
            d += self.activity_vocab.len() + 1; // + unknown slot
        }
        if self.elapsed_seconds {
            d += 1;
        }
        if self.previous_event_delta {
            d += 1;
        }
        if self.previous_object_type_count {
            d += 1;
        }
        if self.numeric_event_attrs {
            d += self.numeric_event_attr_names.len();
        }
        d
    }

    /// Length of the feature vector of objects of `type_name`.
    pub fn object_feature_dim(&self, type_name: &str) -> usize {
        let numeric = self.object_numeric_attrs.get(type_name).map_or(0, Vec::len);
        let categorical: usize = self
            .object_categorical_vocabs
            .get(type_name)
            .map_or(0, |m| m.values().map(Vec::len).sum());
        numeric + categorical
    }
}

/// Z-score statistics fitted exclusively on training-split data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    /// Remaining-time target, in seconds.
    pub target: MeanStd,
    /// Scalar event features: `elapsed_seconds`, `previous_event_delta`, and
    /// numeric event attributes by name.
    pub event_features: BTreeMap<String, MeanStd>,
    /// Per object type: numeric attribute name -> statistics.
    pub object_features: BTreeMap<String, BTreeMap<String, MeanStd>>,
}

/// Split membership of one execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

/// Assignment of executions (by execution id) to splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub assignment: BTreeMap<String, Split>,
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl SplitAssignment {
    pub fn members<'a>(
        &self,
        executions: &'a [ProcessExecution],
        split: Split,
    ) -> Vec<&'a ProcessExecution> {
        executions
            .iter()
            .filter(|ex| self.assignment.get(&ex.id) == Some(&split))
            .collect()
    }
}

/// Shuffle executions with a seeded PRNG and partition by ratio. With
/// `chronological` set, the extraction order (earliest event first) is kept
/// instead of shuffling.
pub fn assign_splits(
    executions: &[ProcessExecution],
    ratios: [f64; 3],
    seed: u64,
    chronological: bool,
) -> Result<SplitAssignment> {
    let total: f64 = ratios.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CoreError::BadSplitRatios(total));
    }
    let nonzero = ratios.iter().filter(|r| **r > 0.0).count();
    if executions.len() < nonzero {
        return Err(CoreError::TooFewExecutions {
            have: executions.len(),
            need: nonzero,
        });
    }

    let mut order: Vec<usize> = (0..executions.len()).collect();
    if !chronological {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
    }

    let n = executions.len() as f64;
    let cut1 = (ratios[0] * n).round() as usize;
    let cut2 = ((ratios[0] + ratios[1]) * n).round() as usize;
    let mut assignment = BTreeMap::new();
    for (pos, &idx) in order.iter().enumerate() {
        let split = if pos < cut1 {
            Split::Train
        } else if pos < cut2 {
            Split::Validation
        } else {
            Split::Test
        };
        assignment.insert(executions[idx].id.clone(), split);
    }
    Ok(SplitAssignment {
        assignment,
        ratios,
        seed,
    })
}

/// Seconds from `event_id` to the last event of its execution. Non-negative
/// by the ordering invariant.
pub fn remaining_time(execution: &ProcessExecution, event_id: &str, log: &EventLog) -> Result<f64> {
    if !execution.contains_event(event_id) {
        return Err(CoreError::EventNotInExecution {
            event: event_id.to_string(),
        });
    }
    let last = execution
        .event_ids
        .last()
        .expect("non-empty execution contains the event");
    let last_ts = log.event(last)?.timestamp;
    let ts = log.event(event_id)?.timestamp;
    Ok(last_ts.seconds_since(ts))
}

/// Fit target and feature statistics over all events of the training
/// executions.
pub fn fit_normalization(
    train: &[&ProcessExecution],
    log: &EventLog,
    cfg: &FeatureConfig,
) -> Result<NormalizationStats> {
    if train.is_empty() {
        return Err(CoreError::EmptyTrainSplit);
    }

    let mut targets = Vec::new();
    let mut elapsed = Vec::new();
    let mut deltas = Vec::new();
    let mut numeric: BTreeMap<&str, Vec<f64>> = cfg
        .numeric_event_attr_names
        .iter()
        .map(|n| (n.as_str(), Vec::new()))
        .collect();

    for ex in train {
        for eid in &ex.event_ids {
            targets.push(remaining_time(ex, eid, log)?);
            elapsed.push(elapsed_seconds(ex, eid, log)?);
            deltas.push(previous_event_delta(ex, eid, log)?);
            let ev = log.event(eid)?;
            for (name, values) in numeric.iter_mut() {
                if let Some(AttributeValue::Number(x)) = ev.attrs.get(*name) {
                    values.push(*x);
                }
            }
        }
    }

    let mut event_features = BTreeMap::new();
    event_features.insert(ELAPSED_FEATURE.to_string(), mean_std(&elapsed)?);
    event_features.insert(DELTA_FEATURE.to_string(), mean_std(&deltas)?);
    for (name, values) in numeric {
        // Attribute may be absent from the train split entirely; zero stats
        // keep the encoding total.
        let stats = if values.is_empty() {
            MeanStd {
                mean: 0.0,
                std: 1.0,
            }
        } else {
            mean_std(&values)?
        };
        event_features.insert(name.to_string(), stats);
    }

    let mut train_objects: BTreeSet<&str> = BTreeSet::new();
    for ex in train {
        train_objects.extend(ex.object_ids.iter().map(String::as_str));
    }
    let mut object_features: BTreeMap<String, BTreeMap<String, MeanStd>> = BTreeMap::new();
    for (ty, attrs) in &cfg.object_numeric_attrs {
        let mut per_attr = BTreeMap::new();
        for attr in attrs {
            let values: Vec<f64> = log
                .objects_of_type(ty)
                .iter()
                .filter(|o| train_objects.contains(o.id.as_str()))
                .filter_map(|o| o.attrs.get(attr).and_then(AttributeValue::as_number))
                .collect();
            let stats = if values.is_empty() {
                MeanStd {
                    mean: 0.0,
                    std: 1.0,
                }
            } else {
                mean_std(&values)?
            };
            per_attr.insert(attr.clone(), stats);
        }
        object_features.insert(ty.clone(), per_attr);
    }

    Ok(NormalizationStats {
        target: mean_std(&targets)?,
        event_features,
        object_features,
    })
}

/// Seconds elapsed since the execution's first event.
pub fn elapsed_seconds(ex: &ProcessExecution, event_id: &str, log: &EventLog) -> Result<f64> {
    if !ex.contains_event(event_id) {
        return Err(CoreError::EventNotInExecution {
            event: event_id.to_string(),
        });
    }
    let first = log.event(&ex.event_ids[0])?.timestamp;
    Ok(log.event(event_id)?.timestamp.seconds_since(first))
}

/// Seconds since the immediately preceding event of the execution, 0 for the
/// first event.
pub fn previous_event_delta(ex: &ProcessExecution, event_id: &str, log: &EventLog) -> Result<f64> {
    let pos = ex
        .event_ids
        .iter()
        .position(|e| e == event_id)
        .ok_or_else(|| CoreError::EventNotInExecution {
            event: event_id.to_string(),
        })?;
    if pos == 0 {
        return Ok(0.0);
    }
    let prev = log.event(&ex.event_ids[pos - 1])?.timestamp;
    Ok(log.event(event_id)?.timestamp.seconds_since(prev))
}

/// Count of distinct object types referenced by strictly preceding events of
/// the execution.
pub fn previous_object_type_count(
    ex: &ProcessExecution,
    event_id: &str,
    log: &EventLog,
) -> Result<f64> {
    let pos = ex
        .event_ids
        .iter()
        .position(|e| e == event_id)
        .ok_or_else(|| CoreError::EventNotInExecution {
            event: event_id.to_string(),
        })?;
    let mut types: BTreeSet<&str> = BTreeSet::new();
    for eid in &ex.event_ids[..pos] {
        let ev = log.event(eid)?;
        for (ty, ids) in &ev.refs {
            if !ids.is_empty() {
                types.insert(ty);
            }
        }
    }
    Ok(types.len() as f64)
}

/// The event feature vector, concatenated in fixed order:
/// `[activity one-hot | elapsed (z) | delta (z) | previous object type count
/// | numeric event attributes (z)]`.
pub fn event_feature_vector(
    ex: &ProcessExecution,
    event_id: &str,
    log: &EventLog,
    cfg: &FeatureConfig,
    stats: &NormalizationStats,
) -> Result<Vec<f64>> {
    let ev = log.event(event_id)?;
    let mut out = Vec::with_capacity(cfg.event_feature_dim());
    if cfg.activity_onehot {
        let mut onehot = vec![0.0; cfg.activity_vocab.len() + 1];
        let slot = cfg
            .activity_vocab
            .iter()
            .position(|a| *a == ev.activity)
            .unwrap_or(cfg.activity_vocab.len());
        onehot[slot] = 1.0;
        out.extend(onehot);
    }
    if cfg.elapsed_seconds {
        let x = elapsed_seconds(ex, event_id, log)?;
        out.push(stats.event_features[ELAPSED_FEATURE].standardize(x));
    }
    if cfg.previous_event_delta {
        let x = previous_event_delta(ex, event_id, log)?;
        out.push(stats.event_features[DELTA_FEATURE].standardize(x));
    }
    if cfg.previous_object_type_count {
        out.push(previous_object_type_count(ex, event_id, log)?);
    }
    if cfg.numeric_event_attrs {
        for name in &cfg.numeric_event_attr_names {
            let x = ev
                .attrs
                .get(name)
                .and_then(AttributeValue::as_number)
                .unwrap_or(0.0);
            out.push(stats.event_features[name].standardize(x));
        }
    }
    Ok(out)
}

/// The object feature vector: standardized numerics followed by per-attribute
/// one-hot categoricals, both in the config's attribute order.
pub fn object_feature_vector(
    obj: &ObjectInstance,
    cfg: &FeatureConfig,
    stats: &NormalizationStats,
    zero_fill: bool,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(cfg.object_feature_dim(&obj.type_name));
    let missing = |attr: &str| CoreError::MissingAttribute {
        object: obj.id.clone(),
        type_name: obj.type_name.clone(),
        attr: attr.to_string(),
    };
    if let Some(attrs) = cfg.object_numeric_attrs.get(&obj.type_name) {
        for attr in attrs {
            let x = match obj.attrs.get(attr).and_then(AttributeValue::as_number) {
                Some(x) => x,
                None if zero_fill => 0.0,
                None => return Err(missing(attr)),
            };
            out.push(stats.object_features[&obj.type_name][attr].standardize(x));
        }
    }
    if let Some(vocabs) = cfg.object_categorical_vocabs.get(&obj.type_name) {
        for (attr, vocab) in vocabs {
            let mut onehot = vec![0.0; vocab.len()];
            match obj.attrs.get(attr).and_then(AttributeValue::as_category) {
                Some(c) => {
                    if let Some(slot) = vocab.iter().position(|v| v == c) {
                        onehot[slot] = 1.0;
                    }
                }
                None if zero_fill => {}
                None => return Err(missing(attr)),
            }
            out.extend(onehot);
        }
    }
    Ok(out)
}
