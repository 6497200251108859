use std::io::Write;

use proptest::prelude::*;
use uqlab::data::{
    load_csv, read_csv, split, standardize, synthetic_blobs, write_csv, CsvFormat, CsvSchema,
    LabelMap, HMNIST_PIXELS,
};
use uqlab::rng::RngStream;

fn generic() -> CsvSchema {
    CsvSchema { label_column: "label".into(), format: CsvFormat::Generic }
}

#[test]
fn file_round_trip_is_identical() {
    let d = synthetic_blobs(60, 4, 2.5, 1.3, &mut RngStream::new(9, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blobs.csv");
    write_csv(&d, std::fs::File::create(&path).unwrap()).unwrap();
    let back = load_csv(&path, &generic(), &LabelMap::identity()).unwrap();
    assert_eq!(back.features, d.features);
    assert_eq!(back.labels, d.labels);
    assert_eq!(back.feature_names, d.feature_names);

    let mut again = Vec::new();
    write_csv(&back, &mut again).unwrap();
    assert_eq!(again, std::fs::read(&path).unwrap());
}

#[test]
fn generic_csv_with_custom_tokens() {
    let text = "f1,f2,label\n1,2,a\n3,4,b\n5,6,a\n";
    let map = LabelMap::from_json(r#"{"a": 0, "b": 1}"#).unwrap();
    let d = read_csv(text.as_bytes(), &generic(), &map, "inline").unwrap();
    assert_eq!(d.labels, vec![0, 1, 0]);
    assert_eq!(d.features.row(2), &[5.0, 6.0]);
}

fn hmnist_csv(rows: &[(u8, &str)]) -> String {
    let mut s: String = (0..HMNIST_PIXELS).map(|i| format!("pixel{i:04},")).collect();
    s.push_str("label\n");
    for (pixel, label) in rows {
        for _ in 0..HMNIST_PIXELS {
            s.push_str(&format!("{pixel},"));
        }
        s.push_str(label);
        s.push('\n');
    }
    s
}

#[test]
fn hmnist_scaling_and_default_mapping() {
    let text = hmnist_csv(&[(255, "4"), (0, "0"), (51, "5")]);
    let schema = CsvSchema { label_column: "label".into(), format: CsvFormat::Auto };
    let d = read_csv(text.as_bytes(), &schema, &LabelMap::ham10000_default(), "hmnist").unwrap();
    assert!(d.features.row(0).iter().all(|&v| v == 1.0));
    assert!(d.features.row(1).iter().all(|&v| v == 0.0));
    assert!(d.features.row(2).iter().all(|&v| v == 0.2));
    assert_eq!(d.labels, vec![0, 1, 0]);
}

#[test]
fn unknown_token_is_named() {
    let text = hmnist_csv(&[(10, "7")]);
    let schema = CsvSchema { label_column: "label".into(), format: CsvFormat::Hmnist };
    let err = read_csv(text.as_bytes(), &schema, &LabelMap::ham10000_default(), "x").unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains('7'), "{err}");
}

#[test]
fn load_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = load_csv(&dir.path().join("nope.csv"), &generic(), &LabelMap::identity()).unwrap_err();
    assert_eq!(missing.exit_code(), 4);

    let path = dir.path().join("bad.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "x,label\n1.5,0\nabc,1").unwrap();
    let bad = load_csv(&path, &generic(), &LabelMap::identity()).unwrap_err();
    assert_eq!(bad.exit_code(), 3);

    let no_label = read_csv("x,y\n1,2\n".as_bytes(), &generic(), &LabelMap::identity(), "x").unwrap_err();
    assert_eq!(no_label.exit_code(), 2);
}

#[test]
fn stratified_split_counts() {
    let d = synthetic_blobs(120, 1, 1.0, 1.0, &mut RngStream::new(1, 2)).unwrap();
    // 40 of class 0, 60 of class 1.
    let keep: Vec<usize> = (20..120).collect();
    let d = d.subset(&keep, "skewed");
    assert_eq!(d.class_counts(), [40, 60]);
    let (tr, te) = split(&d, 0.8, &mut RngStream::new(3, 1), true).unwrap();
    assert_eq!(tr.class_counts(), [32, 48]);
    assert_eq!(te.class_counts(), [8, 12]);
}

#[test]
fn standardized_training_columns() {
    let d = synthetic_blobs(400, 5, 3.0, 2.0, &mut RngStream::new(2, 2)).unwrap();
    let (tr, te) = split(&d, 0.8, &mut RngStream::new(2, 1), false).unwrap();
    let (z, others, stats) = standardize(&tr, &[&te]).unwrap();
    for c in 0..z.dims() {
        let col: Vec<f64> = z.features.iter_rows().map(|r| r[c]).collect();
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 1e-10);
        assert!((var.sqrt() - 1.0).abs() < 1e-10);
    }
    assert_eq!(others[0].len(), te.len());
    assert_eq!(stats.apply(&te).unwrap(), others[0]);
}

#[test]
fn blob_means_near_specification() {
    let n = 4000;
    let d = synthetic_blobs(n, 3, 4.0, 1.5, &mut RngStream::new(8, 2)).unwrap();
    assert_eq!(d.class_counts(), [n / 2, n / 2]);
    let tol = 5.0 * 1.5 / ((n / 2) as f64).sqrt();
    for class in 0..2 {
        let rows: Vec<&[f64]> = d.features.iter_rows().zip(&d.labels).filter(|(_, &y)| y == class).map(|(r, _)| r).collect();
        for c in 0..3 {
            let mean = rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64;
            let expect = if c == 0 { (class as f64 - 0.5) * 4.0 * 1.5 } else { 0.0 };
            assert!((mean - expect).abs() < tol, "class {class} col {c}: {mean}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_a_partition(half in 1usize..100, frac in 0.05f64..0.95, seed in any::<u64>(), strat in any::<bool>()) {
        let d = synthetic_blobs(half * 2, 2, 1.0, 1.0, &mut RngStream::new(seed, 2)).unwrap();
        match split(&d, frac, &mut RngStream::new(seed, 1), strat) {
            Ok((tr, te)) => {
                prop_assert_eq!(tr.len() + te.len(), d.len());
                let key = |r: &[f64], y: usize| (r.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), y);
                let mut all: Vec<_> = d.features.iter_rows().zip(&d.labels).map(|(r, &y)| key(r, y)).collect();
                let mut parts: Vec<_> = tr.features.iter_rows().zip(&tr.labels)
                    .chain(te.features.iter_rows().zip(&te.labels))
                    .map(|(r, &y)| key(r, y))
                    .collect();
                all.sort();
                parts.sort();
                prop_assert_eq!(all, parts);
            }
            Err(e) => prop_assert_eq!(e.exit_code(), 3),
        }
    }
}
