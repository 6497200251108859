//! Evaluation of uncertainty estimates: the uncertainty confusion matrix and
//! its four ratios, calibration error, classical classification metrics,
//! threshold sweeps, entropy histograms and run summaries.
//!
//! Everything here is a pure function of its inputs.

mod calibration;
mod classical;
mod confusion;
mod histogram;
mod records;
mod stats;
mod sweep;

pub use calibration::{confidence_bin, ece, CalibrationBin, CalibrationBins, EceResult};
pub use classical::{auc, classical_metrics, records_auc, ClassicalMetrics};
pub use confusion::{classify_outcomes, uncertainty_metrics, UncertaintyConfusionMatrix, UncertaintyMetrics};
pub use histogram::{entropy_histogram, EntropyHistogram};
pub use records::{read_records, records_from, write_records, PredictionRecord, RECORD_HEADER};
pub use stats::{quantile_sorted, summary_stats, SummaryStats};
pub use sweep::{threshold_grid, threshold_sweep, SweepRow};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Every metric for one record set at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub n: usize,
    pub confusion: UncertaintyConfusionMatrix,
    pub uncertainty: UncertaintyMetrics,
    pub calibration: EceResult,
    pub classical: ClassicalMetrics,
    /// `None` when only one class is present.
    pub auc: Option<f64>,
}

pub fn evaluate(records: &[PredictionRecord], threshold: f64, ece_bins: usize) -> Result<Evaluation> {
    let confusion = classify_outcomes(records, threshold)?;
    Ok(Evaluation {
        n: records.len(),
        uncertainty: uncertainty_metrics(&confusion)?,
        confusion,
        calibration: ece(records, ece_bins)?,
        classical: classical_metrics(records)?,
        auc: records_auc(records).ok(),
    })
}
