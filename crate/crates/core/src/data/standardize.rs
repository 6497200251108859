use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Result, UqError};

/// Per-feature training mean and sample standard deviation.
///
/// Zero-variance features are stored as mean 0, std 1 so they pass through
/// unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizationStats {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(UqError::data("cannot standardize on an empty training set"));
        }
        let n = train.len() as f64;
        let d = train.dims();
        let mut mean = train.features.column_sums();
        for m in &mut mean {
            *m /= n;
        }
        let mut ss = vec![0.0; d];
        for row in train.features.iter_rows() {
            for ((s, x), m) in ss.iter_mut().zip(row).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        let mut std = vec![1.0; d];
        for j in 0..d {
            let s = if train.len() > 1 { (ss[j] / (n - 1.0)).sqrt() } else { 0.0 };
            if s > 0.0 && s.is_finite() {
                std[j] = s;
            } else {
                mean[j] = 0.0;
            }
        }
        Ok(Self { mean, std })
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.dims() != self.mean.len() {
            return Err(UqError::dim(format!(
                "stats cover {} features, dataset has {}",
                self.mean.len(),
                data.dims()
            )));
        }
        let mut out = data.clone();
        let d = self.mean.len();
        for r in 0..out.len() {
            let row = out.features.row_mut(r);
            for j in 0..d {
                row[j] = (row[j] - self.mean[j]) / self.std[j];
            }
        }
        Ok(out)
    }
}

/// Z-scores `train` and every dataset in `apply_to` with statistics fitted on
/// `train` alone.
pub fn standardize(
    train: &Dataset,
    apply_to: &[&Dataset],
) -> Result<(Dataset, Vec<Dataset>, StandardizationStats)> {
    let stats = StandardizationStats::fit(train)?;
    let train_std = stats.apply(train)?;
    let others = apply_to
        .iter()
        .map(|d| stats.apply(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((train_std, others, stats))
}
