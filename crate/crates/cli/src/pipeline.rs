//! Dataset assembly: extract executions, assign splits, fit feature and
//! normalization statistics on the train split, and encode per the chosen
//! encoder.

use hoegkit_core::{
    assign_splits, encode_efg, encode_hoeg, fit_normalization, subgraph_samples, window_efg,
    EventLog, FeatureConfig, Hoeg, NormalizationStats, ProcessExecution, Split, SplitAssignment,
};
use rayon::prelude::*;

use crate::config::{Encoder, RunConfig};
use crate::error::{CliError, Result};

pub struct Dataset {
    pub executions: Vec<ProcessExecution>,
    pub assignment: SplitAssignment,
    pub feature_config: FeatureConfig,
    pub stats: NormalizationStats,
    pub train: Vec<Hoeg>,
    pub validation: Vec<Hoeg>,
    pub test: Vec<Hoeg>,
    /// Graph-level targets (subgraph-sampling mode).
    pub pooled: bool,
}

impl Dataset {
    pub fn split(&self, split: Split) -> &[Hoeg] {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }
}

fn encode_split(
    executions: &[&ProcessExecution],
    log: &EventLog,
    cfg: &FeatureConfig,
    stats: &NormalizationStats,
    encoder: Encoder,
    subgraph_k: usize,
) -> Result<Vec<Hoeg>> {
    let encoded: Vec<Result<Vec<Hoeg>>> = executions
        .par_iter()
        .map(|ex| -> Result<Vec<Hoeg>> {
            match encoder {
                Encoder::Hoeg => Ok(vec![encode_hoeg(ex, log, cfg, stats, None)?]),
                Encoder::Efg => Ok(vec![encode_efg(ex, log, cfg, stats)?.to_hoeg_view()]),
                Encoder::EfgSs => {
                    let efg = encode_efg(ex, log, cfg, stats)?;
                    Ok(subgraph_samples(&efg, subgraph_k)
                        .iter()
                        .map(|s| window_efg(&efg, s).to_hoeg_view())
                        .collect())
                }
            }
        })
        .collect();
    let mut graphs = Vec::new();
    for result in encoded {
        graphs.extend(result?);
    }
    Ok(graphs)
}

pub fn build_dataset(log: &EventLog, run: &RunConfig) -> Result<Dataset> {
    let strategy = run.strategy()?;
    let executions = hoegkit_core::extract(log, &strategy)?;
    if executions.is_empty() {
        return Err(CliError::Domain("log yields no process executions".into()));
    }
    let assignment = assign_splits(&executions, run.splits, run.seed, run.chronological_splits)?;
    let train_refs = assignment.members(&executions, Split::Train);
    let feature_config = FeatureConfig::fit(log, &train_refs, run.features);
    let stats = fit_normalization(&train_refs, log, &feature_config)?;

    let mut per_split = Vec::new();
    for split in [Split::Train, Split::Validation, Split::Test] {
        let members = assignment.members(&executions, split);
        per_split.push(encode_split(
            &members,
            log,
            &feature_config,
            &stats,
            run.encoder,
            run.subgraph_k,
        )?);
    }
    let mut iter = per_split.into_iter();
    Ok(Dataset {
        executions,
        assignment,
        feature_config,
        stats,
        train: iter.next().unwrap(),
        validation: iter.next().unwrap(),
        test: iter.next().unwrap(),
        pooled: run.encoder == Encoder::EfgSs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::build_otc_fixture;
    use hoegkit_core::model::ModelConfig;
    use hoegkit_core::FeatureFlags;

    fn run_for(encoder: Encoder) -> RunConfig {
        RunConfig {
            input: "unused".into(),
            out: "unused".into(),
            extraction: "leading:item".into(),
            splits: [1.0, 0.0, 0.0],
            seed: 1,
            chronological_splits: false,
            encoder,
            dataset: "otc".into(),
            features: FeatureFlags::default(),
            model: ModelConfig::default(),
            subgraph_k: 4,
        }
    }

    #[test]
    fn fixture_dataset_per_encoder() {
        let log = build_otc_fixture();
        let hoeg = build_dataset(&log, &run_for(Encoder::Hoeg)).unwrap();
        assert_eq!(hoeg.train.len(), 3);
        assert!(!hoeg.pooled);
        // every graph carries the full type signature, even for absent types
        for g in &hoeg.train {
            assert_eq!(g.node_types.len(), 5);
        }

        let efg = build_dataset(&log, &run_for(Encoder::Efg)).unwrap();
        for g in &efg.train {
            assert_eq!(g.node_types.len(), 1);
        }

        let ss = build_dataset(&log, &run_for(Encoder::EfgSs)).unwrap();
        assert!(ss.pooled);
        // e9 co-references everything, so o2/p2/d1 tie between i1 and i3 and
        // go to i1: executions have 10, 1, and 5 events -> 7 + 0 + 2 samples
        assert_eq!(ss.train.len(), 9);
        for g in &ss.train {
            assert_eq!(g.event_count(), 4);
        }
    }
}
