use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn uqlab(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_uqlab"));
    cmd.args(args).env_remove("UQLAB_SEED");
    if let Some(s) = seed_env {
        cmd.env("UQLAB_SEED", s);
    }
    cmd.output().expect("spawn uqlab")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_train_predict_evaluate_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let train_csv = tmp.path().join("train.csv");
    let test_csv = tmp.path().join("test.csv");
    ok(&uqlab(&["synth", "--n", "300", "--dims", "3", "--seed", "1", "--out", s(&train_csv)], None));
    ok(&uqlab(&["synth", "--n", "100", "--dims", "3", "--seed", "2", "--out", s(&test_csv)], None));

    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"hidden_sizes": [8], "training": {"epochs": 3}, "ensemble": {"member_count": 2}}"#).unwrap();
    let models = tmp.path().join("models");
    let out = uqlab(
        &["train", "--config", s(&cfg), "--data", s(&train_csv), "--label-map", "/nonexistent", "--out", s(&models)],
        None,
    );
    assert_eq!(out.status.code(), Some(4), "missing label map is an I/O error");

    let map = tmp.path().join("map.json");
    fs::write(&map, r#"{"0": 0, "1": 1}"#).unwrap();
    ok(&uqlab(&["train", "--config", s(&cfg), "--data", s(&train_csv), "--label-map", s(&map), "--out", s(&models)], None));
    assert!(models.join("model.model.json").is_file());
    assert!(models.join("ensemble/manifest.json").is_file());
    assert!(models.join("standardization.json").is_file());

    for method in ["mcd", "ensemble", "emcd"] {
        let records = tmp.path().join(format!("{method}.csv"));
        ok(&uqlab(
            &[
                "predict", "--model", s(&models), "--data", s(&test_csv), "--label-map", s(&map),
                "--method", method, "--mc-samples", "10", "--seed", "3", "--out", s(&records),
            ],
            None,
        ));
        let text = fs::read_to_string(&records).unwrap();
        assert_eq!(text.lines().next().unwrap(), "true_label,predicted_label,confidence,entropy");
        assert_eq!(text.lines().count(), 101);

        let eval = tmp.path().join(format!("{method}.json"));
        ok(&uqlab(&["evaluate", "--records", s(&records), "--threshold", "0.4", "--out", s(&eval)], None));
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&eval).unwrap()).unwrap();
        assert_eq!(v["n"], 100);
        assert_eq!(v["calibration"]["calibration"]["bins"].as_array().unwrap().len(), 10);

        let sweep = tmp.path().join(format!("{method}_sweep.csv"));
        ok(&uqlab(&["sweep", "--records", s(&records), "--out", s(&sweep)], None));
        assert_eq!(fs::read_to_string(&sweep).unwrap().lines().count(), 18);
    }

    // A single model file works for MC dropout.
    let single = tmp.path().join("single.csv");
    ok(&uqlab(
        &[
            "predict", "--model", s(&models.join("model.model.json")), "--data", s(&test_csv),
            "--label-map", s(&map), "--method", "mcd", "--mc-samples", "5", "--out", s(&single),
        ],
        None,
    ));
}

#[test]
fn seed_precedence_config_env_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = |name: &str, args: &[&str], env: Option<&str>| {
        let p = tmp.path().join(name);
        let mut a = vec!["synth", "--n", "20", "--dims", "2", "--out", s(&p)];
        a.extend_from_slice(args);
        ok(&uqlab(&a, env));
        fs::read(&p).unwrap()
    };
    let flag5 = gen("a.csv", &["--seed", "5"], None);
    let env5 = gen("b.csv", &[], Some("5"));
    let env9_flag5 = gen("c.csv", &["--seed", "5"], Some("9"));
    let env9 = gen("d.csv", &[], Some("9"));
    assert_eq!(flag5, env5);
    assert_eq!(flag5, env9_flag5);
    assert_ne!(flag5, env9);

    let bad = uqlab(&["synth", "--n", "20", "--out", s(&tmp.path().join("e.csv"))], Some("not-a-number"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");

    // Configuration: odd n, unknown method, malformed config.
    assert_eq!(uqlab(&["synth", "--n", "7", "--out", s(&out)], None).status.code(), Some(2));
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(uqlab(&["study", "--config", s(&cfg), "--out", s(&out)], None).status.code(), Some(2));
    assert_eq!(
        uqlab(&["study", "--methods", "mcd,bogus", "--out", s(&out)], None).status.code(),
        Some(2)
    );

    // Data: malformed record file.
    let recs = tmp.path().join("recs.csv");
    fs::write(&recs, "true_label,predicted_label,confidence,entropy\n0,1,1.5,0.1\n").unwrap();
    assert_eq!(uqlab(&["evaluate", "--records", s(&recs), "--out", s(&out)], None).status.code(), Some(3));

    // I/O: missing input.
    let missing = tmp.path().join("missing.csv");
    assert_eq!(uqlab(&["sweep", "--records", s(&missing), "--out", s(&out)], None).status.code(), Some(4));
}

#[test]
fn study_with_method_subset() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"data": {"n": 300, "dims": 3}, "hidden_sizes": [8], "training": {"epochs": 2}, "repetitions": 1}"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = uqlab(&["study", "--config", s(&cfg), "--methods", "ensemble", "--out", s(&out)], Some("11"));
    ok(&o);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(v["methods"].as_array().unwrap().len(), 1);
    assert_eq!(v["provenance"]["seed"], 11);
    assert!(out.join("records_ensemble.csv").is_file());
    assert!(!out.join("records_mcd.csv").exists());
}
