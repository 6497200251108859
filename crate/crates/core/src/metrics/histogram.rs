use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::error::{Result, UqError};

/// Entropy histograms for correct and misclassified predictions over
/// `bin_count` equal-width bins on `[0, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyHistogram {
    pub edges: Vec<f64>,
    pub correct: Vec<usize>,
    pub incorrect: Vec<usize>,
    /// `None` flags an empty group.
    pub correct_mean: Option<f64>,
    pub incorrect_mean: Option<f64>,
}

impl EntropyHistogram {
    pub fn correct_total(&self) -> usize {
        self.correct.iter().sum()
    }

    pub fn incorrect_total(&self) -> usize {
        self.incorrect.iter().sum()
    }
}

/// `upper` is the maximal entropy for the log base in use (ln 2 for nats).
/// Entropies above it land in the last bin.
pub fn entropy_histogram(records: &[PredictionRecord], bin_count: usize, upper: f64) -> Result<EntropyHistogram> {
    if bin_count == 0 {
        return Err(UqError::config("histogram needs at least one bin"));
    }
    if !(upper.is_finite() && upper > 0.0) {
        return Err(UqError::config("histogram upper bound must be positive"));
    }
    let mut correct = vec![0usize; bin_count];
    let mut incorrect = vec![0usize; bin_count];
    let (mut sum_c, mut sum_i) = (0.0, 0.0);
    for r in records {
        let b = ((r.entropy / upper * bin_count as f64).floor().max(0.0) as usize).min(bin_count - 1);
        if r.is_correct() {
            correct[b] += 1;
            sum_c += r.entropy;
        } else {
            incorrect[b] += 1;
            sum_i += r.entropy;
        }
    }
    let nc: usize = correct.iter().sum();
    let ni: usize = incorrect.iter().sum();
    Ok(EntropyHistogram {
        edges: (0..=bin_count).map(|k| upper * k as f64 / bin_count as f64).collect(),
        correct,
        incorrect,
        correct_mean: (nc > 0).then(|| sum_c / nc as f64),
        incorrect_mean: (ni > 0).then(|| sum_i / ni as f64),
    })
}
