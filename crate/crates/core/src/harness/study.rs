use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig};
use crate::data::{self, CsvSchema, Dataset, LabelMap, StandardizationStats};
use crate::error::{Result, UqError};
use crate::metrics::{
    self, entropy_histogram, records_from, summary_stats, threshold_grid, threshold_sweep,
    EntropyHistogram, Evaluation, PredictionRecord, SummaryStats, SweepRow,
};
use crate::nn::{self, Model};
use crate::predictors::{build_ensemble, train_ensemble, ModelPool, PredictOptions, PredictorRegistry};
use crate::rng::{derive_seed, streams, RngStream};

/// Train/test data after splitting and optional standardization.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: Dataset,
    pub test: Dataset,
    pub stats: Option<StandardizationStats>,
    pub label_map: Option<LabelMap>,
}

pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    let (full, label_map) = match &config.data {
        DataSource::Synthetic {
            n,
            dims,
            separation,
            noise_std,
        } => {
            let mut rng = RngStream::new(config.seed, streams::SYNTH);
            (data::synthetic_blobs(*n, *dims, *separation, *noise_std, &mut rng)?, None)
        }
        DataSource::Csv {
            path,
            label_column,
            format,
            label_map,
        } => {
            let map = match label_map {
                Some(p) => LabelMap::load(p)?,
                None => LabelMap::ham10000_default(),
            };
            let schema = CsvSchema {
                label_column: label_column.clone(),
                format: *format,
            };
            (data::load_csv(path, &schema, &map)?, Some(map))
        }
    };
    let mut rng = RngStream::new(config.seed, streams::SPLIT);
    let (train, test) = data::split(&full, config.train_fraction, &mut rng, config.stratified)?;
    if config.standardize {
        let (train, mut rest, stats) = data::standardize(&train, &[&test])?;
        Ok(PreparedData {
            train,
            test: rest.remove(0),
            stats: Some(stats),
            label_map,
        })
    } else {
        Ok(PreparedData {
            train,
            test,
            stats: None,
            label_map,
        })
    }
}

/// The single network used for MC dropout and the repeated-run study.
pub fn train_base_model(config: &ExperimentConfig, train: &Dataset, seed: u64) -> Result<Model> {
    let mut arch = config.base_architecture(train.dims());
    arch.seed = seed;
    nn::train(&arch, train, &config.training, &mut RngStream::new(seed, streams::INIT_AND_TRAIN))
}

pub fn train_ensemble_models(config: &ExperimentConfig, train: &Dataset) -> Result<Vec<Model>> {
    let archs = build_ensemble(&config.ensemble_spec(), train.dims(), config.dropout_retain)?;
    train_ensemble(&archs, train, &config.training)
}

/// Seed for MC-dropout masks during evaluation.
pub fn prediction_seed(master: u64) -> u64 {
    derive_seed(master, streams::PREDICT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub run: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseModelStudy {
    pub repetitions: usize,
    pub hidden_sizes: Vec<usize>,
    pub runs: Vec<RunMetrics>,
    /// Keyed by `accuracy`, `sensitivity`, `specificity`, `auc`; a metric
    /// undefined in every run is omitted.
    pub summary: BTreeMap<String, SummaryStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub models: usize,
    pub spotlight_threshold: f64,
    pub evaluation: Evaluation,
    pub sweep: Vec<SweepRow>,
    pub entropy_histogram: EntropyHistogram,
    #[serde(skip)]
    pub records: Vec<PredictionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub data: String,
    pub train_rows: usize,
    pub test_rows: usize,
    pub label_map: Option<BTreeMap<String, usize>>,
    pub standardization: Option<StandardizationStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub base_model: Option<BaseModelStudy>,
    pub methods: Vec<MethodReport>,
    pub annotations: Vec<String>,
}

fn provenance(config: &ExperimentConfig, data: &PreparedData) -> Provenance {
    Provenance {
        tool: "uqlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        data: data.train.provenance.trim_end_matches(" [train]").to_string(),
        train_rows: data.train.len(),
        test_rows: data.test.len(),
        label_map: data.label_map.as_ref().map(|m| m.entries().clone()),
        standardization: data.stats.clone(),
    }
}

fn annotations(config: &ExperimentConfig) -> Vec<String> {
    let mut notes = vec![format!(
        "spotlight threshold {}; recommended operating range for the entropy threshold is 0.3 to 0.7",
        config.spotlight_threshold
    )];
    let max_h = config.log_base.max_entropy(nn::NUM_CLASSES);
    if config.thresholds.end > max_h {
        notes.push(format!(
            "binary entropy never exceeds {max_h:.6} in this log base; sweep rows above it are identical"
        ));
    }
    notes
}

pub fn base_model_study(config: &ExperimentConfig, data: &PreparedData) -> Result<BaseModelStudy> {
    let runs = (0..config.repetitions)
        .map(|r| {
            let seed = derive_seed(config.seed, 1_000 + r as u64);
            let model = train_base_model(config, &data.train, seed)?;
            let probs = model.predict_proba(&data.test.features)?;
            let dists = probs
                .iter_rows()
                .map(|row| {
                    crate::predictors::PredictiveDistribution::from_mean(row.to_vec(), config.log_base, None)
                })
                .collect::<Result<Vec<_>>>()?;
            let records = records_from(&dists, &data.test.labels)?;
            let c = metrics::classical_metrics(&records)?;
            Ok(RunMetrics {
                run: r,
                seed,
                accuracy: c.accuracy,
                sensitivity: c.sensitivity,
                specificity: c.specificity,
                auc: metrics::auc(&probs.iter_rows().map(|p| p[1]).collect::<Vec<_>>(), &data.test.labels).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = BTreeMap::new();
    let columns: [(&str, fn(&RunMetrics) -> Option<f64>); 4] = [
        ("accuracy", |r| Some(r.accuracy)),
        ("sensitivity", |r| r.sensitivity),
        ("specificity", |r| r.specificity),
        ("auc", |r| r.auc),
    ];
    for (name, get) in columns {
        let values: Vec<f64> = runs.iter().filter_map(get).collect();
        if !values.is_empty() {
            summary.insert(name.to_string(), summary_stats(&values)?);
        }
    }
    Ok(BaseModelStudy {
        repetitions: config.repetitions,
        hidden_sizes: config.hidden_sizes.clone(),
        runs,
        summary,
    })
}

pub fn uq_methods(
    config: &ExperimentConfig,
    data: &PreparedData,
    registry: &PredictorRegistry,
) -> Result<Vec<MethodReport>> {
    let predictors = registry.resolve(&config.methods)?;
    let needs = |pool| predictors.iter().any(|p| p.model_pool() == pool);
    let single = if needs(ModelPool::Single) {
        vec![train_base_model(config, &data.train, config.seed)?]
    } else {
        Vec::new()
    };
    let members = if needs(ModelPool::Ensemble) {
        train_ensemble_models(config, &data.train)?
    } else {
        Vec::new()
    };
    let opts = PredictOptions {
        mc_samples: config.mc_samples,
        seed: prediction_seed(config.seed),
        keep_samples: false,
        log_base: config.log_base,
    };
    let grid = threshold_grid(config.thresholds.start, config.thresholds.end, config.thresholds.step)?;
    let upper = config.log_base.max_entropy(nn::NUM_CLASSES);

    predictors
        .iter()
        .map(|p| {
            let models = match p.model_pool() {
                ModelPool::Single => &single,
                ModelPool::Ensemble => &members,
            };
            let dists = p.predict(models, &data.test.features, &opts)?;
            let records = records_from(&dists, &data.test.labels)?;
            Ok(MethodReport {
                method: p.name().to_string(),
                models: models.len(),
                spotlight_threshold: config.spotlight_threshold,
                evaluation: metrics::evaluate(&records, config.spotlight_threshold, config.ece_bins)?,
                sweep: threshold_sweep(&records, &grid)?,
                entropy_histogram: entropy_histogram(&records, config.entropy_bins, upper)?,
                records,
            })
        })
        .collect()
}

/// Repeated base-model training only; the bundle has no method sections.
pub fn run_base_model_study(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    if config.repetitions == 0 {
        return Err(UqError::config("repetitions must be at least 1"));
    }
    let data = prepare_data(config)?;
    Ok(ReportBundle {
        config: config.clone(),
        provenance: provenance(config, &data),
        base_model: Some(base_model_study(config, &data)?),
        methods: Vec::new(),
        annotations: annotations(config),
    })
}

/// The three-method uncertainty study only.
pub fn run_uq_study(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    if config.methods.is_empty() {
        return Err(UqError::config("select at least one method"));
    }
    let data = prepare_data(config)?;
    Ok(ReportBundle {
        config: config.clone(),
        provenance: provenance(config, &data),
        base_model: None,
        methods: uq_methods(config, &data, &PredictorRegistry::default())?,
        annotations: annotations(config),
    })
}

/// Both studies over one data preparation. Zero repetitions skips the
/// base-model study; an empty method list skips the uncertainty study.
pub fn run_study(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    let data = prepare_data(config)?;
    let base_model = if config.repetitions > 0 {
        Some(base_model_study(config, &data)?)
    } else {
        None
    };
    Ok(ReportBundle {
        config: config.clone(),
        provenance: provenance(config, &data),
        base_model,
        methods: uq_methods(config, &data, &PredictorRegistry::default())?,
        annotations: annotations(config),
    })
}
