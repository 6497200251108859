use std::collections::BTreeSet;
use std::fs;

use uqlab::harness::{
    emit_reports, run_base_model_study, run_study, run_uq_study, DataSource, EnsembleConfig,
    ExperimentConfig, RELIABILITY_HEADER, RUNS_HEADER,
};
use uqlab::metrics::{read_records, threshold_grid, threshold_sweep, uncertainty_metrics, classify_outcomes};

fn small() -> ExperimentConfig {
    let mut c = ExperimentConfig::desk();
    c.data = DataSource::Synthetic { n: 400, dims: 4, separation: 3.0, noise_std: 1.0 };
    c.hidden_sizes = vec![12, 6];
    c.training.epochs = 5;
    c.mc_samples = 8;
    c.ensemble.member_count = 3;
    c.repetitions = 2;
    c
}

fn file_names(dir: &std::path::Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

#[test]
fn base_model_study_two_runs() {
    let b = run_base_model_study(&small()).unwrap();
    let base = b.base_model.as_ref().unwrap();
    assert_eq!(base.runs.len(), 2);
    assert!(b.methods.is_empty());
    for key in ["accuracy", "sensitivity", "specificity", "auc"] {
        let s = &base.summary[key];
        assert_eq!(s.n, 2);
        assert!(s.std.is_some());
    }
    assert_eq!(run_base_model_study(&small()).unwrap(), b);
}

#[test]
fn single_method_selection() {
    let mut c = small();
    c.methods = vec!["mcd".into()];
    let b = run_uq_study(&c).unwrap();
    assert_eq!(b.methods.len(), 1);
    assert_eq!(b.methods[0].method, "mcd");
    assert_eq!(b.methods[0].spotlight_threshold, 0.4);
    assert_eq!(b.methods[0].sweep.len(), 17);
}

#[test]
fn degenerate_configuration_makes_methods_agree() {
    let mut c = small();
    c.dropout_retain = 1.0;
    c.mc_samples = 1;
    c.ensemble = EnsembleConfig {
        member_count: 1,
        depth_choices: vec![2],
        width_ranges: vec![(12, 13), (6, 7)],
    };
    let b = run_uq_study(&c).unwrap();
    assert_eq!(b.methods.len(), 3);
    let first = &b.methods[0];
    for m in &b.methods[1..] {
        assert_eq!(m.records, first.records, "{}", m.method);
        assert_eq!(m.evaluation, first.evaluation, "{}", m.method);
        assert_eq!(m.sweep, first.sweep, "{}", m.method);
    }
}

#[test]
fn emitted_files_and_cross_checks() {
    let c = small();
    let bundle = run_study(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_reports(&bundle, dir.path()).unwrap();

    let mut expected: BTreeSet<String> = [
        "metrics.json", "runs.csv", "sweep.csv", "reliability.csv", "entropy_hist.csv", "table2.csv",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for m in ["mcd", "ensemble", "emcd"] {
        expected.insert(format!("records_{m}.csv"));
        for kind in ["reliability", "sweep", "entropy"] {
            expected.insert(format!("{kind}_{m}.svg"));
        }
    }
    assert_eq!(file_names(dir.path()), expected);

    let reliability = fs::read_to_string(dir.path().join("reliability.csv")).unwrap();
    assert_eq!(reliability.lines().next().unwrap(), RELIABILITY_HEADER);
    for m in ["mcd", "ensemble", "emcd"] {
        let rows = reliability.lines().filter(|l| l.starts_with(&format!("{m},"))).count();
        assert_eq!(rows, c.ece_bins);
    }
    let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs.lines().next().unwrap(), RUNS_HEADER);
    assert_eq!(runs.lines().count(), 1 + c.repetitions);

    // Recomputing from the emitted records reproduces the emitted tables.
    let grid = threshold_grid(0.1, 0.9, 0.05).unwrap();
    for m in &bundle.methods {
        let file = fs::File::open(dir.path().join(format!("records_{}.csv", m.method))).unwrap();
        let records = read_records(file).unwrap();
        assert_eq!(records, m.records);
        let sweep = threshold_sweep(&records, &grid).unwrap();
        assert_eq!(sweep, m.sweep);
        let spot = classify_outcomes(&records, 0.4).unwrap();
        assert_eq!(uncertainty_metrics(&spot).unwrap(), m.evaluation.uncertainty);
    }
}

#[test]
fn no_methods_writes_two_files() {
    let mut c = small();
    c.methods.clear();
    let bundle = run_study(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_reports(&bundle, dir.path()).unwrap();
    let names = file_names(dir.path());
    assert_eq!(names, ["metrics.json", "runs.csv"].iter().map(|s| s.to_string()).collect());
}

#[test]
fn same_seed_gives_identical_bytes() {
    let c = small();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    emit_reports(&run_study(&c).unwrap(), a.path()).unwrap();
    emit_reports(&run_study(&c).unwrap(), b.path()).unwrap();
    for name in file_names(a.path()) {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name}");
    }

    let mut other = c.clone();
    other.seed += 1;
    let d = tempfile::tempdir().unwrap();
    emit_reports(&run_study(&other).unwrap(), d.path()).unwrap();
    assert_ne!(fs::read(a.path().join("sweep.csv")).unwrap(), fs::read(d.path().join("sweep.csv")).unwrap());
}

#[test]
fn unknown_method_is_config_error() {
    let mut c = small();
    c.methods = vec!["bogus".into()];
    assert_eq!(run_uq_study(&c).unwrap_err().exit_code(), 2);
}
