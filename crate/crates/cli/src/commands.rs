//! Command implementations. Each returns the process exit code: 0 success,
//! 1 domain violation, 2 usage/I/O error (the latter surfaced as errors and
//! mapped in main).

use std::collections::BTreeMap;
use std::path::Path;

use hoegkit_core::model::ModelConfig;
use hoegkit_core::{
    encode_hoeg, evaluate, median_baseline, train, EventLog, Hoeg, Predictor, Split,
};

use crate::checkpoint::{parse_params, serialize_params};
use crate::config::{parse_strategy, RunConfig};
use crate::error::{CliError, Result};
use crate::graphs::serialize_hoeg;
use crate::metrics::{write_metrics, MetricsRow};
use crate::ocel::{parse_ocel, parse_parts, serialize_log};
use crate::pipeline::{build_dataset, Dataset};
use crate::stats::log_stats;

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_log(path: &Path) -> Result<EventLog> {
    let bytes = read_file(path)?;
    let (log, report) = parse_ocel(&bytes)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(log)
}

pub fn cmd_validate(path: &Path) -> Result<i32> {
    let bytes = read_file(path)?;
    let (events, objects, warnings) = parse_parts(&bytes)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    match EventLog::new(events, objects) {
        Ok(log) => {
            let violations = log.validate();
            if violations.is_empty() {
                println!(
                    "valid: {} events, {} objects, {} object types",
                    log.events().len(),
                    log.objects().len(),
                    log.object_types().len()
                );
                Ok(0)
            } else {
                for v in &violations {
                    println!("{v}");
                }
                Ok(1)
            }
        }
        Err(violations) => {
            for v in &violations {
                println!("{v}");
            }
            Ok(1)
        }
    }
}

pub fn cmd_stats(path: &Path, extraction: &str) -> Result<i32> {
    let log = load_log(path)?;
    let strategy = parse_strategy(extraction)?;
    let stats = log_stats(&log, &strategy)?;
    println!("{}", stats.summary_row());
    Ok(0)
}

pub fn cmd_extract(path: &Path, extraction: &str, out: &Path) -> Result<i32> {
    let log = load_log(path)?;
    let strategy = parse_strategy(extraction)?;
    let executions = hoegkit_core::extract(&log, &strategy)?;
    let mut text = serde_json::to_string_pretty(&executions).expect("serializable executions");
    text.push('\n');
    write_file(&out.join("executions.json"), &text)?;
    println!("{} executions -> {}", executions.len(), out.display());
    Ok(0)
}

pub fn cmd_fixture(out: &Path) -> Result<i32> {
    let log = crate::fixture::build_otc_fixture();
    write_file(out, &serialize_log(&log))?;
    println!("fixture -> {}", out.display());
    Ok(0)
}

pub fn cmd_encode(run: &RunConfig, prefix: Option<&str>) -> Result<i32> {
    let log = load_log(&run.input)?;
    let dataset = build_dataset(&log, run)?;

    let mut manifest = Vec::new();
    for split in [Split::Train, Split::Validation, Split::Test] {
        for graph in dataset.split(split) {
            // apply the prefix view where the event exists; other executions
            // are emitted in full
            let graph: Hoeg = match prefix {
                Some(eid) if graph.node_index["event"].contains_key(eid) => {
                    let ex = dataset
                        .executions
                        .iter()
                        .find(|ex| ex.id == graph.execution_id)
                        .ok_or_else(|| {
                            CliError::Usage(format!(
                                "--prefix applies to full executions, not {} samples",
                                run.encoder.name()
                            ))
                        })?;
                    encode_hoeg(ex, &log, &dataset.feature_config, &dataset.stats, Some(eid))?
                }
                _ => graph.clone(),
            };
            let file = format!("{}.graph.json", sanitize(&graph.execution_id));
            write_file(&run.out.join(&file), &serialize_hoeg(&graph))?;
            manifest.push(serde_json::json!({
                "execution_id": graph.execution_id,
                "file": file,
                "split": split.name(),
                "events": graph.event_count(),
            }));
        }
    }
    let mut text = serde_json::to_string_pretty(&serde_json::json!({
        "encoder": run.encoder.name(),
        "graphs": manifest,
    }))
    .expect("serializable manifest");
    text.push('\n');
    write_file(&run.out.join("manifest.json"), &text)?;
    println!(
        "encoded {} graphs -> {}",
        manifest_len(&run.out)?,
        run.out.display()
    );
    Ok(0)
}

fn manifest_len(out: &Path) -> Result<usize> {
    let bytes = read_file(&out.join("manifest.json"))?;
    let doc: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(doc["graphs"].as_array().map_or(0, Vec::len))
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn refs(graphs: &[Hoeg]) -> Vec<&Hoeg> {
    graphs.iter().collect()
}

fn split_rows(
    dataset_name: &str,
    model_name: &str,
    predictor: &Predictor,
    data: &Dataset,
    fit_seconds: f64,
) -> Result<Vec<MetricsRow>> {
    let mut rows = Vec::new();
    for split in [Split::Train, Split::Validation, Split::Test] {
        let graphs = data.split(split);
        if graphs.is_empty() {
            continue;
        }
        let (mae, mse, predict_seconds) = evaluate(predictor, &refs(graphs), data.pooled)?;
        rows.push(MetricsRow {
            dataset: dataset_name.to_string(),
            model: model_name.to_string(),
            split: split.name().to_string(),
            mae,
            mse,
            fit_seconds,
            predict_seconds,
        });
    }
    Ok(rows)
}

fn train_once(run: &RunConfig, data: &Dataset, model_cfg: &ModelConfig) -> Result<Vec<MetricsRow>> {
    let mut cfg = model_cfg.clone();
    cfg.pooled = data.pooled;
    cfg.validate_domains()?;
    let (params, mut report) = train(&refs(&data.train), &refs(&data.validation), &cfg)?;
    let predictor = Predictor::Model {
        params: params.clone(),
        pooled: data.pooled,
    };

    let mut rows = split_rows(
        &run.dataset,
        run.encoder.name(),
        &predictor,
        data,
        report.fit_seconds,
    )?;

    let train_targets: Vec<f64> = data
        .train
        .iter()
        .flat_map(|g| hoegkit_core::model::graph_targets(g, data.pooled))
        .collect();
    let median = median_baseline(&train_targets)?;
    rows.extend(split_rows(&run.dataset, "median", &median, data, 0.0)?);

    report.final_metrics = rows
        .iter()
        .filter(|r| r.model == run.encoder.name())
        .map(|r| (r.split.clone(), (r.mae, r.mse)))
        .collect();
    report.predict_seconds = rows
        .iter()
        .filter(|r| r.model == run.encoder.name())
        .map(|r| r.predict_seconds)
        .sum();

    write_file(
        &run.out.join("checkpoint.json"),
        &serialize_params(&params, data.pooled),
    )?;
    let mut report_text = serde_json::to_string_pretty(&report).expect("serializable report");
    report_text.push('\n');
    write_file(&run.out.join("report.json"), &report_text)?;
    Ok(rows)
}

pub fn cmd_train(run: &RunConfig) -> Result<i32> {
    let log = load_log(&run.input)?;
    let data = build_dataset(&log, run)?;
    let rows = train_once(run, &data, &run.model)?;
    write_metrics(&run.out.join("metrics.csv"), &rows)?;
    for row in &rows {
        println!(
            "{} {} {} mae={:.4} mse={:.4}",
            row.dataset, row.model, row.split, row.mae, row.mse
        );
    }
    Ok(0)
}

pub fn cmd_evaluate(run: &RunConfig, checkpoint: &Path) -> Result<i32> {
    let log = load_log(&run.input)?;
    let data = build_dataset(&log, run)?;
    let bytes = read_file(checkpoint)?;
    let (params, pooled) = parse_params(&bytes)?;
    if pooled != data.pooled {
        return Err(CliError::Usage(
            "checkpoint pooling mode does not match the configured encoder".into(),
        ));
    }
    let predictor = Predictor::Model { params, pooled };
    let rows = split_rows(&run.dataset, run.encoder.name(), &predictor, &data, 0.0)?;
    write_metrics(&run.out.join("metrics.csv"), &rows)?;
    for row in &rows {
        println!(
            "{} {} {} mae={:.4} mse={:.4}",
            row.dataset, row.model, row.split, row.mae, row.mse
        );
    }
    Ok(0)
}

pub fn cmd_grid(run: &RunConfig, hidden_dims: &[usize], learning_rates: &[f64]) -> Result<i32> {
    let log = load_log(&run.input)?;
    let data = build_dataset(&log, run)?;

    let mut dims = hidden_dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let mut rates = learning_rates.to_vec();
    rates.sort_by(|a, b| a.partial_cmp(b).expect("finite rates"));
    rates.dedup();

    let mut rows = Vec::new();
    for &hd in &dims {
        for &lr in &rates {
            let mut cfg = run.model.clone();
            cfg.hidden_dim = hd;
            cfg.learning_rate = lr;
            cfg.pooled = data.pooled;
            cfg.validate_domains()?;
            let (params, report) = train(&refs(&data.train), &refs(&data.validation), &cfg)?;
            let predictor = Predictor::Model {
                params,
                pooled: data.pooled,
            };
            let split = if data.validation.is_empty() {
                Split::Train
            } else {
                Split::Validation
            };
            let graphs = data.split(split);
            let (mae, mse, predict_seconds) = evaluate(&predictor, &refs(graphs), data.pooled)?;
            rows.push(MetricsRow {
                dataset: run.dataset.clone(),
                model: format!("{}[hd={hd},lr={lr}]", run.encoder.name()),
                split: split.name().to_string(),
                mae,
                mse,
                fit_seconds: report.fit_seconds,
                predict_seconds,
            });
        }
    }
    write_metrics(&run.out.join("grid.csv"), &rows)?;
    println!("{} grid rows -> {}", rows.len(), run.out.display());
    Ok(0)
}

/// Effective run config after flag overrides; used by main and tests.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<std::path::PathBuf>,
    pub out: Option<std::path::PathBuf>,
    pub seed: Option<u64>,
    pub encoder: Option<String>,
    pub extraction: Option<String>,
    pub splits: Option<[f64; 3]>,
}

pub fn apply_overrides(mut run: RunConfig, ov: &Overrides) -> Result<RunConfig> {
    if let Some(input) = &ov.input {
        run.input = input.clone();
    }
    if let Some(out) = &ov.out {
        run.out = out.clone();
    }
    if let Some(seed) = ov.seed {
        run.seed = seed;
    }
    if let Some(encoder) = &ov.encoder {
        run.encoder = crate::config::Encoder::parse(encoder)?;
    }
    if let Some(extraction) = &ov.extraction {
        parse_strategy(extraction)?;
        run.extraction = extraction.clone();
    }
    if let Some(splits) = ov.splits {
        run.splits = splits;
    }
    Ok(run)
}

/// Metrics keyed (model, split) with timing columns dropped, for determinism
/// comparisons.
pub fn metrics_without_timing(rows: &[MetricsRow]) -> BTreeMap<(String, String), (f64, f64)> {
    rows.iter()
        .map(|r| ((r.model.clone(), r.split.clone()), (r.mae, r.mse)))
        .collect()
}
