//! Datasets: CSV ingestion, label mapping, standardization, splitting and a
//! synthetic two-class generator.

mod csv_io;
mod label_map;
mod split;
mod standardize;
mod synthetic;

pub use csv_io::{load_csv, read_csv, write_csv, CsvFormat, CsvSchema, HMNIST_PIXELS};
pub use label_map::LabelMap;
pub use split::{split, split_indices};
pub use standardize::{standardize, StandardizationStats};
pub use synthetic::synthetic_blobs;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UqError};
use crate::nn::Matrix;

/// Feature matrix plus binary labels (0 = negative / non-cancer, 1 = positive / cancer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub feature_names: Option<Vec<String>>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<usize>,
        feature_names: Option<Vec<String>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(UqError::data(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y > 1) {
            return Err(UqError::data(format!("label {bad} is not binary")));
        }
        if let Some(names) = &feature_names {
            if names.len() != features.cols() {
                return Err(UqError::data(format!(
                    "{} feature names for {} columns",
                    names.len(),
                    features.cols()
                )));
            }
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.features.cols()
    }

    /// Rows by index, in the given order.
    pub fn subset(&self, indices: &[usize], provenance: impl Into<String>) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            provenance: provenance.into(),
        }
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut c = [0, 0];
        for &y in &self.labels {
            c[y] += 1;
        }
        c
    }
}
