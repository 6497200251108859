//! Experiment driver: configuration, the repeated-run base-model study, the
//! three-method uncertainty study and report emission.

mod config;
mod report;
mod study;
mod svg;

pub use config::{
    resolve_seed, DataSource, EnsembleConfig, ExperimentConfig, GridConfig, Profile, SEED_ENV,
};
pub use report::{
    emit_reports, ENTROPY_HIST_HEADER, RELIABILITY_HEADER, RUNS_HEADER, SWEEP_HEADER,
    TABLE2_HEADER,
};
pub use study::{
    base_model_study, prediction_seed, prepare_data, run_base_model_study, run_study,
    run_uq_study, train_base_model, train_ensemble_models, uq_methods, BaseModelStudy,
    MethodReport, PreparedData, Provenance, ReportBundle, RunMetrics,
};
