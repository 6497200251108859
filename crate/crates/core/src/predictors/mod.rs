//! Epistemic-uncertainty predictors.
//!
//! Each predictor turns one or more trained networks into a
//! [`PredictiveDistribution`] per input row: the mean class probabilities
//! and their predictive entropy. They are registered by name in a
//! [`PredictorRegistry`] so the harness and CLI can pick one at runtime.

mod emcd;
mod ensemble;
mod entropy;
mod mcd;
mod registry;

pub use emcd::emcd_predict;
pub use ensemble::{
    build_ensemble, ensemble_predict, load_ensemble, save_ensemble, train_ensemble, EnsembleSpec,
    ENSEMBLE_MANIFEST,
};
pub use entropy::{predictive_entropy, LogBase};
pub use mcd::mcd_predict;
pub use registry::{
    EmcdPredictor, EnsemblePredictor, McdPredictor, ModelPool, PredictOptions, PredictorRegistry,
    UncertaintyPredictor,
};

use serde::{Deserialize, Serialize};

use crate::error::{Result, UqError};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveDistribution {
    pub mean_probs: Vec<f64>,
    pub predictive_entropy: f64,
    /// Argmax of `mean_probs`; ties go to the lower class index.
    pub predicted_class: usize,
    /// Per-pass or per-member probability rows, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<f64>>>,
}

impl PredictiveDistribution {
    pub fn from_mean(
        mean_probs: Vec<f64>,
        log_base: LogBase,
        samples: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let predictive_entropy = predictive_entropy(&mean_probs, log_base)?;
        let predicted_class = argmax(&mean_probs);
        Ok(Self {
            mean_probs,
            predictive_entropy,
            predicted_class,
            samples,
        })
    }

    /// Largest mean class probability.
    pub fn confidence(&self) -> f64 {
        self.mean_probs[self.predicted_class]
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Turns an accumulated `n × C` probability sum into per-row distributions.
pub(crate) fn finish(
    sums: &Matrix,
    count: usize,
    log_base: LogBase,
    mut samples: Option<Vec<Vec<Vec<f64>>>>,
) -> Result<Vec<PredictiveDistribution>> {
    if count == 0 {
        return Err(UqError::config("cannot average zero probability rows"));
    }
    (0..sums.rows())
        .map(|r| {
            let mean: Vec<f64> = sums.row(r).iter().map(|s| s / count as f64).collect();
            let s = samples.as_mut().map(|all| std::mem::take(&mut all[r]));
            PredictiveDistribution::from_mean(mean, log_base, s)
        })
        .collect()
}

pub(crate) fn accumulate(
    sums: &mut Matrix,
    probs: &Matrix,
    samples: Option<&mut Vec<Vec<Vec<f64>>>>,
) {
    for (s, p) in sums.values_mut().iter_mut().zip(probs.values()) {
        *s += p;
    }
    if let Some(all) = samples {
        for (r, row) in probs.iter_rows().enumerate() {
            all[r].push(row.to_vec());
        }
    }
}
