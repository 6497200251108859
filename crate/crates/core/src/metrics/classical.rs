use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::error::{Result, UqError};

/// Accuracy with class 1 (cancer) as the positive class. Sensitivity or
/// specificity is `None` when the corresponding class is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMetrics {
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn classical_metrics(records: &[PredictionRecord]) -> Result<ClassicalMetrics> {
    if records.is_empty() {
        return Err(UqError::data("no prediction records"));
    }
    let (mut tp, mut fn_, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for r in records {
        match (r.true_label, r.predicted_label) {
            (1, 1) => tp += 1,
            (1, _) => fn_ += 1,
            (_, 1) => fp += 1,
            _ => tn += 1,
        }
    }
    let ratio = |a: usize, b: usize| (a + b > 0).then(|| a as f64 / (a + b) as f64);
    Ok(ClassicalMetrics {
        accuracy: (tp + tn) as f64 / records.len() as f64,
        sensitivity: ratio(tp, fn_),
        specificity: ratio(tn, fp),
    })
}

/// Area under the ROC curve via the rank-sum statistic; ties count one half.
pub fn auc(scores: &[f64], labels: &[usize]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(UqError::dim(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(UqError::data("AUC scores must be finite"));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(UqError::data("AUC is undefined unless both classes are present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Mid-ranks are 1-based and half-integral, so this sum is exact.
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            if labels[k] == 1 {
                pos_rank_sum += mid_rank;
            }
        }
        i = j + 1;
    }
    let u = pos_rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// AUC of the class-1 probability implied by each record.
pub fn records_auc(records: &[PredictionRecord]) -> Result<f64> {
    let scores: Vec<f64> = records.iter().map(PredictionRecord::positive_score).collect();
    let labels: Vec<usize> = records.iter().map(|r| r.true_label).collect();
    auc(&scores, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(labels: &[usize], preds: &[usize]) -> Vec<PredictionRecord> {
        labels
            .iter()
            .zip(preds)
            .map(|(&t, &p)| PredictionRecord { true_label: t, predicted_label: p, confidence: 0.9, entropy: 0.3 })
            .collect()
    }

    #[test]
    fn counts_by_hand() {
        let m = classical_metrics(&recs(&[1, 1, 0, 0], &[1, 0, 0, 0])).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert_eq!(m.sensitivity, Some(0.5));
        assert_eq!(m.specificity, Some(1.0));
        let all = classical_metrics(&recs(&[1, 0, 1], &[1, 0, 1])).unwrap();
        assert_eq!((all.accuracy, all.sensitivity, all.specificity), (1.0, Some(1.0), Some(1.0)));
    }

    #[test]
    fn single_class_leaves_rate_undefined() {
        let m = classical_metrics(&recs(&[1, 1], &[1, 0])).unwrap();
        assert_eq!(m.specificity, None);
        assert_eq!(m.sensitivity, Some(0.5));
    }

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5; 4], &[0, 1, 0, 1]).unwrap(), 0.5);
        assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]).unwrap(), 0.75);
        assert!(matches!(auc(&[0.1, 0.2], &[1, 1]), Err(UqError::Data(_))));
    }
}
