use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, LabelMap};
use crate::error::{Result, UqError};
use crate::nn::Matrix;

/// 28 × 28 × 3 flattened RGB pixels.
pub const HMNIST_PIXELS: usize = 2352;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsvFormat {
    /// `pixel0000..pixel2351` integers in 0–255, scaled to [0, 1] on load.
    Hmnist,
    /// Arbitrary numeric feature columns, loaded as-is.
    Generic,
    /// HMNIST when the non-label header is exactly the 2352 pixel columns.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub label_column: String,
    pub format: CsvFormat,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            format: CsvFormat::Auto,
        }
    }
}

fn is_hmnist_header(feature_names: &[String]) -> bool {
    feature_names.len() == HMNIST_PIXELS
        && feature_names
            .iter()
            .enumerate()
            .all(|(i, n)| *n == format!("pixel{i:04}"))
}

pub fn load_csv(path: &Path, schema: &CsvSchema, label_map: &LabelMap) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| UqError::io(path, e))?;
    read_csv(file, schema, label_map, path.display().to_string())
}

pub fn read_csv<R: Read>(
    reader: R,
    schema: &CsvSchema,
    label_map: &LabelMap,
    provenance: impl Into<String>,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| UqError::data(format!("cannot read CSV header: {e}")))?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == schema.label_column)
        .ok_or_else(|| {
            UqError::config(format!("missing label column {:?}", schema.label_column))
        })?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != label_idx).collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| headers[i].to_string()).collect();
    if feature_names.is_empty() {
        return Err(UqError::config("CSV has no feature columns"));
    }

    let format = match schema.format {
        CsvFormat::Auto if is_hmnist_header(&feature_names) => CsvFormat::Hmnist,
        CsvFormat::Auto => CsvFormat::Generic,
        CsvFormat::Hmnist if !is_hmnist_header(&feature_names) => {
            return Err(UqError::config(format!(
                "HMNIST schema needs columns pixel0000..pixel{:04}",
                HMNIST_PIXELS - 1
            )))
        }
        f => f,
    };

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| UqError::data(format!("CSV row {}: {e}", r + 1)))?;
        if record.len() != headers.len() {
            return Err(UqError::data(format!(
                "row {} has {} cells, header has {}",
                r + 1,
                record.len(),
                headers.len()
            )));
        }
        for &c in &feature_cols {
            let cell = &record[c];
            let v: f64 = cell.parse().map_err(|_| {
                UqError::data(format!(
                    "row {}, column {:?}: {cell:?} is not numeric",
                    r + 1,
                    &headers[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(UqError::data(format!(
                    "row {}, column {:?}: non-finite value",
                    r + 1,
                    &headers[c]
                )));
            }
            let v = match format {
                CsvFormat::Hmnist => {
                    if !(0.0..=255.0).contains(&v) {
                        return Err(UqError::data(format!(
                            "row {}, column {:?}: pixel {v} outside 0-255",
                            r + 1,
                            &headers[c]
                        )));
                    }
                    v / 255.0
                }
                _ => v,
            };
            values.push(v);
        }
        labels.push(label_map.map(&record[label_idx])?);
    }
    if labels.is_empty() {
        return Err(UqError::data("CSV has no data rows"));
    }
    let features = Matrix::from_vec(labels.len(), feature_names.len(), values)?;
    Dataset::new(features, labels, Some(feature_names), provenance)
}

/// Writes features (shortest round-trip decimal) and binary labels under a
/// `label` column. Reading back with [`LabelMap::identity`] and
/// [`CsvFormat::Generic`] reproduces the dataset.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let names: Vec<String> = match &dataset.feature_names {
        Some(n) => n.clone(),
        None => (0..dataset.dims()).map(|i| format!("x{i}")).collect(),
    };
    let csv_err = |e: csv::Error| UqError::data(format!("CSV write failed: {e}"));
    w.write_record(names.iter().map(String::as_str).chain(["label"]))
        .map_err(csv_err)?;
    for (row, y) in dataset.features.iter_rows().zip(&dataset.labels) {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        cells.push(y.to_string());
        w.write_record(&cells).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| UqError::data(format!("CSV flush failed: {e}")))?;
    Ok(())
}
