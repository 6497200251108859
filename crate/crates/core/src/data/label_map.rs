use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UqError};

const HAM10000_DEFAULT: &str = include_str!("../../../../config/ham10000_label_map.json");

/// Raw class token → binary class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelMap(BTreeMap<String, usize>);

impl LabelMap {
    pub fn new(entries: BTreeMap<String, usize>) -> Result<Self> {
        if let Some((k, v)) = entries.iter().find(|(_, &v)| v > 1) {
            return Err(UqError::config(format!(
                "label map sends {k:?} to {v}; targets must be 0 or 1"
            )));
        }
        Ok(Self(entries))
    }

    /// `"0" → 0`, `"1" → 1`.
    pub fn identity() -> Self {
        Self(BTreeMap::from([("0".into(), 0), ("1".into(), 1)]))
    }

    /// HAM10000 seven-class to cancer/non-cancer mapping: mel, bcc and akiec
    /// are positive. Covers both the HMNIST integer codes and the dx names.
    pub fn ham10000_default() -> Self {
        Self::from_json(HAM10000_DEFAULT).expect("bundled label map is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: BTreeMap<String, usize> =
            serde_json::from_str(text).map_err(|e| UqError::json("label map", e))?;
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| UqError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn map(&self, token: &str) -> Result<usize> {
        self.0
            .get(token.trim())
            .copied()
            .ok_or_else(|| UqError::data(format!("label token {:?} is not in the label map", token.trim())))
    }

    pub fn entries(&self) -> &BTreeMap<String, usize> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_map_is_total_over_codes() {
        let m = LabelMap::ham10000_default();
        for code in 0..7 {
            assert!(m.map(&code.to_string()).is_ok());
        }
        assert_eq!(m.map("mel").unwrap(), 1);
        assert_eq!(m.map("nv").unwrap(), 0);
        // HMNIST code 6 is melanoma, 4 is melanocytic nevus.
        assert_eq!(m.map("6").unwrap(), 1);
        assert_eq!(m.map("4").unwrap(), 0);
    }

    #[test]
    fn unknown_token_names_itself() {
        let err = LabelMap::ham10000_default().map("7").unwrap_err();
        assert!(matches!(err, UqError::Data(_)));
        assert!(err.to_string().contains("\"7\""));
    }

    #[test]
    fn non_binary_target_rejected() {
        assert!(LabelMap::from_json(r#"{"a": 2}"#).is_err());
    }
}
