use super::matrix::Matrix;
use crate::error::{Result, UqError};

/// Probabilities below this are clamped before taking the log.
pub const LOG_FLOOR: f64 = 1e-12;

/// Row-wise softmax with max-subtraction.
pub fn softmax(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        softmax_in_place(out.row_mut(r));
    }
    out
}

pub fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Mean negative log-likelihood of the true class.
pub fn cross_entropy_loss(probs: &Matrix, labels: &[usize]) -> Result<f64> {
    if labels.len() != probs.rows() {
        return Err(UqError::dim(format!(
            "{} labels for {} probability rows",
            labels.len(),
            probs.rows()
        )));
    }
    if labels.is_empty() {
        return Err(UqError::data("cross-entropy of an empty batch"));
    }
    let mut total = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        if y >= probs.cols() {
            return Err(UqError::data(format!(
                "label {y} out of range for {} classes",
                probs.cols()
            )));
        }
        total -= probs.get(r, y).max(LOG_FLOOR).ln();
    }
    Ok(total / labels.len() as f64)
}
