use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::error::{Result, UqError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// Fraction correct; `None` for an empty bin.
    pub accuracy: Option<f64>,
    /// Mean confidence; `None` for an empty bin.
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBins {
    pub bins: Vec<CalibrationBin>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EceResult {
    pub ece: f64,
    /// `ece × 100`
    pub ece_percent: f64,
    pub calibration: CalibrationBins,
}

/// Zero-based bin for `confidence`: bin `m` covers `(m/M, (m+1)/M]`, and 0
/// lands in the first bin. Edges are the `f64` values of `m / M`.
pub fn confidence_bin(confidence: f64, bins: usize) -> usize {
    let m = bins as f64;
    let edge = |k: usize| k as f64 / m;
    let mut idx = ((confidence * m).ceil() as isize - 1).clamp(0, bins as isize - 1) as usize;
    while idx > 0 && confidence <= edge(idx) {
        idx -= 1;
    }
    while idx + 1 < bins && confidence > edge(idx + 1) {
        idx += 1;
    }
    idx
}

/// Expected calibration error over `bins` equal-width confidence bins.
pub fn ece(records: &[PredictionRecord], bins: usize) -> Result<EceResult> {
    if bins == 0 {
        return Err(UqError::config("ECE needs at least one bin"));
    }
    if records.is_empty() {
        return Err(UqError::data("no prediction records"));
    }
    let mut count = vec![0usize; bins];
    let mut correct = vec![0usize; bins];
    let mut conf_sum = vec![0.0f64; bins];
    for r in records {
        let b = confidence_bin(r.confidence, bins);
        count[b] += 1;
        correct[b] += usize::from(r.is_correct());
        conf_sum[b] += r.confidence;
    }
    let n = records.len();
    let mut total = 0.0;
    let out_bins = (0..bins)
        .map(|b| {
            let (accuracy, confidence) = if count[b] > 0 {
                let acc = correct[b] as f64 / count[b] as f64;
                let conf = conf_sum[b] / count[b] as f64;
                total += (count[b] as f64 / n as f64) * (acc - conf).abs();
                (Some(acc), Some(conf))
            } else {
                (None, None)
            };
            CalibrationBin {
                lower: b as f64 / bins as f64,
                upper: (b + 1) as f64 / bins as f64,
                count: count[b],
                accuracy,
                confidence,
            }
        })
        .collect();
    Ok(EceResult {
        ece: total,
        ece_percent: total * 100.0,
        calibration: CalibrationBins { bins: out_bins, n },
    })
}
