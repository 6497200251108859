use serde::{Deserialize, Serialize};

use crate::error::{Result, UqError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    /// Nats; binary entropy tops out at ln 2.
    #[default]
    Natural,
    /// Bits; binary entropy tops out at 1.
    Base2,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Base2 => x.log2(),
        }
    }

    /// Entropy of the uniform distribution over `classes`.
    pub fn max_entropy(self, classes: usize) -> f64 {
        self.log(classes as f64)
    }
}

/// `−Σ p log p` with `0 · log 0 = 0`.
pub fn predictive_entropy(probs: &[f64], base: LogBase) -> Result<f64> {
    if probs.is_empty() {
        return Err(UqError::data("entropy of an empty distribution"));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(UqError::data(format!("invalid probability {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(UqError::data(format!("probabilities sum to {total}, not 1")));
    }
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * base.log(p))
        .sum();
    // Rounding can push a near-one-hot entropy a hair below zero.
    Ok(h.max(0.0) + 0.0)
}
