use serde::{Deserialize, Serialize};

use super::{classify_outcomes, uncertainty_metrics, PredictionRecord, UncertaintyConfusionMatrix, UncertaintyMetrics};
use crate::error::{Result, UqError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub matrix: UncertaintyConfusionMatrix,
    pub metrics: UncertaintyMetrics,
}

/// `start, start + step, …, end`, each rounded to 10 decimals.
pub fn threshold_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) {
        return Err(UqError::config("threshold grid bounds must be finite"));
    }
    if step <= 0.0 || end < start {
        return Err(UqError::config(format!(
            "invalid threshold grid {start}..={end} step {step}"
        )));
    }
    let steps = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
        .collect())
}

pub fn threshold_sweep(records: &[PredictionRecord], thresholds: &[f64]) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(UqError::config("threshold list is empty"));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(UqError::config("thresholds must be strictly ascending"));
    }
    thresholds
        .iter()
        .map(|&t| {
            let matrix = classify_outcomes(records, t)?;
            Ok(SweepRow {
                threshold: t,
                matrix,
                metrics: uncertainty_metrics(&matrix)?,
            })
        })
        .collect()
}
