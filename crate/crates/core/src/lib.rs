//! Object-centric event logs, process-execution extraction, homogeneous and
//! heterogeneous graph encodings, and a from-scratch heterogeneous
//! message-passing model for remaining-time regression.

pub mod encode;
pub mod error;
pub mod extraction;
pub mod features;
pub mod log;
pub mod matrix;
pub mod model;
pub mod synth;
pub mod train;

pub use encode::{
    efg_to_table, encode_efg, encode_hoeg, subgraph_samples, window_efg, EdgeType, Efg, Hoeg,
    SubgraphSample, Table, EVENT_NODE_TYPE,
};
pub use error::{CoreError, Result};
pub use extraction::{
    build_object_graph, count_cases, extract, extract_connected_components, extract_leading_type,
    ExtractionStrategy, ObjectGraph, ProcessExecution,
};
pub use features::{
    assign_splits, event_feature_vector, fit_normalization, object_feature_vector, remaining_time,
    FeatureConfig, FeatureFlags, MeanStd, NormalizationStats, Split, SplitAssignment,
};
pub use log::{AttributeValue, Event, EventLog, ObjectInstance, Timestamp, Violation};
pub use matrix::Matrix;
pub use model::{backward, forward, loss, LossKind, ModelConfig, ModelParams, TypeSignature};
pub use train::{evaluate, median_baseline, train, Adam, Predictor, TrainReport};
