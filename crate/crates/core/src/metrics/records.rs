use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, UqError};
use crate::predictors::PredictiveDistribution;

pub const RECORD_HEADER: [&str; 4] = ["true_label", "predicted_label", "confidence", "entropy"];

/// One scored prediction: ground truth, predicted class, max class
/// probability and predictive entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub true_label: usize,
    pub predicted_label: usize,
    pub confidence: f64,
    pub entropy: f64,
}

impl PredictionRecord {
    pub fn from_distribution(dist: &PredictiveDistribution, true_label: usize) -> Self {
        Self {
            true_label,
            predicted_label: dist.predicted_class,
            confidence: dist.confidence(),
            entropy: dist.predictive_entropy,
        }
    }

    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted_label
    }

    /// Probability assigned to class 1, recovered from the binary confidence.
    pub fn positive_score(&self) -> f64 {
        if self.predicted_label == 1 {
            self.confidence
        } else {
            1.0 - self.confidence
        }
    }

    fn validate(&self, row: usize) -> Result<()> {
        if self.true_label > 1 || self.predicted_label > 1 {
            return Err(UqError::data(format!("record {row}: labels must be 0 or 1")));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(UqError::data(format!(
                "record {row}: confidence {} outside [0, 1]",
                self.confidence
            )));
        }
        if !(self.entropy.is_finite() && self.entropy >= 0.0) {
            return Err(UqError::data(format!(
                "record {row}: entropy {} must be finite and non-negative",
                self.entropy
            )));
        }
        Ok(())
    }
}

pub fn records_from(dists: &[PredictiveDistribution], labels: &[usize]) -> Result<Vec<PredictionRecord>> {
    if dists.len() != labels.len() {
        return Err(UqError::dim(format!(
            "{} predictions for {} labels",
            dists.len(),
            labels.len()
        )));
    }
    Ok(dists
        .iter()
        .zip(labels)
        .map(|(d, &y)| PredictionRecord::from_distribution(d, y))
        .collect())
}

/// Record CSV with header `true_label,predicted_label,confidence,entropy`.
/// Floats use the shortest decimal that parses back to the same value.
pub fn write_records<W: Write>(records: &[PredictionRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| UqError::data(format!("record CSV write failed: {e}"));
    w.write_record(RECORD_HEADER).map_err(err)?;
    for r in records {
        w.write_record([
            r.true_label.to_string(),
            r.predicted_label.to_string(),
            r.confidence.to_string(),
            r.entropy.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()
        .map_err(|e| UqError::data(format!("record CSV flush failed: {e}")))
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<PredictionRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| UqError::data(format!("cannot read record header: {e}")))?
        .clone();
    let cols: Vec<usize> = RECORD_HEADER
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| UqError::config(format!("record CSV is missing column {name:?}")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| UqError::data(format!("record row {row}: {e}")))?;
        let cell = |k: usize| -> &str { rec.get(cols[k]).unwrap_or("") };
        let parse_label = |k: usize| -> Result<usize> {
            cell(k).parse().map_err(|_| {
                UqError::data(format!("record row {row}, {}: {:?} is not a class index", RECORD_HEADER[k], cell(k)))
            })
        };
        let parse_real = |k: usize| -> Result<f64> {
            cell(k).parse().map_err(|_| {
                UqError::data(format!("record row {row}, {}: {:?} is not numeric", RECORD_HEADER[k], cell(k)))
            })
        };
        let r = PredictionRecord {
            true_label: parse_label(0)?,
            predicted_label: parse_label(1)?,
            confidence: parse_real(2)?,
            entropy: parse_real(3)?,
        };
        r.validate(row)?;
        out.push(r);
    }
    Ok(out)
}
