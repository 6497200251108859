use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::error::{Result, UqError};

/// Correctness × certainty cross-tabulation at one entropy threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyConfusionMatrix {
    /// correct and certain
    pub tc: usize,
    /// incorrect and uncertain
    pub tu: usize,
    /// correct and uncertain
    pub fu: usize,
    /// incorrect and certain
    pub fc: usize,
    pub threshold: f64,
}

impl UncertaintyConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tc + self.tu + self.fu + self.fc
    }
}

/// A prediction is uncertain when its entropy is strictly above `threshold`.
pub fn classify_outcomes(records: &[PredictionRecord], threshold: f64) -> Result<UncertaintyConfusionMatrix> {
    if records.is_empty() {
        return Err(UqError::data("no prediction records"));
    }
    if !threshold.is_finite() {
        return Err(UqError::config(format!("threshold {threshold} is not finite")));
    }
    let mut m = UncertaintyConfusionMatrix { tc: 0, tu: 0, fu: 0, fc: 0, threshold };
    for r in records {
        match (r.is_correct(), r.entropy > threshold) {
            (true, false) => m.tc += 1,
            (false, true) => m.tu += 1,
            (true, true) => m.fu += 1,
            (false, false) => m.fc += 1,
        }
    }
    Ok(m)
}

/// USen, USpe, UPre and UAcc. A ratio with a zero denominator is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyMetrics {
    pub usen: Option<f64>,
    pub uspe: Option<f64>,
    pub upre: Option<f64>,
    pub uacc: f64,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn uncertainty_metrics(m: &UncertaintyConfusionMatrix) -> Result<UncertaintyMetrics> {
    let total = m.total();
    if total == 0 {
        return Err(UqError::data("uncertainty confusion matrix is empty"));
    }
    Ok(UncertaintyMetrics {
        usen: ratio(m.tu, m.tu + m.fc),
        uspe: ratio(m.tc, m.tc + m.fu),
        upre: ratio(m.tu, m.tu + m.fu),
        uacc: (m.tu + m.tc) as f64 / total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(correct: bool, entropy: f64) -> PredictionRecord {
        PredictionRecord {
            true_label: 1,
            predicted_label: usize::from(correct),
            confidence: 0.9,
            entropy,
        }
    }

    fn ten() -> Vec<PredictionRecord> {
        let mut v = vec![rec(true, 0.1); 6];
        v.push(rec(true, 0.6));
        v.extend([rec(false, 0.65), rec(false, 0.5)]);
        v.push(rec(false, 0.2));
        v
    }

    #[test]
    fn worked_example() {
        let m = classify_outcomes(&ten(), 0.4).unwrap();
        assert_eq!((m.tc, m.fu, m.tu, m.fc), (6, 1, 2, 1));
        let u = uncertainty_metrics(&m).unwrap();
        assert_eq!(u.usen, Some(2.0 / 3.0));
        assert_eq!(u.uspe, Some(6.0 / 7.0));
        assert_eq!(u.upre, Some(2.0 / 3.0));
        assert_eq!(u.uacc, 0.8);
    }

    #[test]
    fn extreme_thresholds() {
        let m = classify_outcomes(&ten(), std::f64::consts::LN_2).unwrap();
        assert_eq!((m.tu, m.fu), (0, 0));
        assert_eq!(m.tc + m.fc, 10);
        let m = classify_outcomes(&ten(), -1.0).unwrap();
        assert_eq!((m.tc, m.fc), (0, 0));
        assert_eq!(m.tu + m.fu, 10);
    }

    #[test]
    fn zero_entropy_is_certain_at_zero_threshold() {
        let m = classify_outcomes(&[rec(true, 0.0)], 0.0).unwrap();
        assert_eq!(m.tc, 1);
    }

    #[test]
    fn perfect_classifier_has_undefined_usen() {
        let recs = vec![rec(true, 0.1), rec(true, 0.5)];
        let u = uncertainty_metrics(&classify_outcomes(&recs, 0.4).unwrap()).unwrap();
        assert_eq!(u.usen, None);
        assert_eq!(u.uspe, Some(0.5));
        assert_eq!(u.upre, Some(0.0));
        assert_eq!(u.uacc, 0.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(classify_outcomes(&[], 0.4), Err(UqError::Data(_))));
        let empty = UncertaintyConfusionMatrix { tc: 0, tu: 0, fu: 0, fc: 0, threshold: 0.4 };
        assert!(uncertainty_metrics(&empty).is_err());
    }
}
