use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accumulate, finish, LogBase, PredictiveDistribution};
use crate::data::Dataset;
use crate::error::{Result, UqError};
use crate::nn::{self, Matrix, MlpArchitecture, Model, TrainConfig, MODEL_EXTENSION, NUM_CLASSES};
use crate::rng::{streams, RngStream};

pub const ENSEMBLE_MANIFEST: &str = "manifest.json";

/// Recipe for a randomized-architecture ensemble.
///
/// Width ranges are half-open `[low, high)`; layer `j` of a member draws from
/// `width_ranges[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub member_count: usize,
    pub depth_choices: Vec<usize>,
    pub width_ranges: Vec<(usize, usize)>,
    pub base_seed: u64,
}

impl EnsembleSpec {
    /// 30 members, two or three hidden layers, widths from
    /// (512, 1024), (128, 512), (8, 128).
    pub fn paper(base_seed: u64) -> Self {
        Self {
            member_count: 30,
            depth_choices: vec![2, 3],
            width_ranges: vec![(512, 1024), (128, 512), (8, 128)],
            base_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.member_count == 0 {
            return Err(UqError::config("ensemble needs at least one member"));
        }
        if self.depth_choices.is_empty() {
            return Err(UqError::config("depth_choices is empty"));
        }
        if let Some((lo, hi)) = self.width_ranges.iter().find(|(lo, hi)| lo >= hi || *lo == 0) {
            return Err(UqError::config(format!(
                "width range ({lo}, {hi}) must satisfy 0 < low < high"
            )));
        }
        if let Some(&d) = self
            .depth_choices
            .iter()
            .find(|&&d| d == 0 || d > self.width_ranges.len())
        {
            return Err(UqError::config(format!(
                "depth {d} needs between 1 and {} width ranges",
                self.width_ranges.len()
            )));
        }
        Ok(())
    }
}

/// Draws each member's architecture from `RngStream(base_seed, i)`. Member `i`
/// trains with seed `base_seed + i`.
pub fn build_ensemble(
    spec: &EnsembleSpec,
    input_dim: usize,
    dropout_retain: f64,
) -> Result<Vec<MlpArchitecture>> {
    spec.validate()?;
    (0..spec.member_count)
        .map(|i| {
            let mut rng = RngStream::new(spec.base_seed, i as u64);
            let depth = spec.depth_choices[rng.random_range(0..spec.depth_choices.len())];
            let hidden = spec.width_ranges[..depth]
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect();
            let arch = MlpArchitecture::new(
                input_dim,
                hidden,
                dropout_retain,
                spec.base_seed.wrapping_add(i as u64),
            );
            arch.validate()?;
            Ok(arch)
        })
        .collect()
}

/// Trains every member in parallel, each from its own seed.
pub fn train_ensemble(
    archs: &[MlpArchitecture],
    data: &Dataset,
    config: &TrainConfig,
) -> Result<Vec<Model>> {
    archs
        .par_iter()
        .map(|a| nn::train(a, data, config, &mut RngStream::new(a.seed, streams::INIT_AND_TRAIN)))
        .collect()
}

pub(crate) fn check_members(models: &[Model]) -> Result<()> {
    let first = models
        .first()
        .ok_or_else(|| UqError::config("at least one model is required"))?;
    if let Some(m) = models.iter().find(|m| m.input_dim() != first.input_dim()) {
        return Err(UqError::config(format!(
            "ensemble members disagree on input_dim ({} vs {})",
            first.input_dim(),
            m.input_dim()
        )));
    }
    Ok(())
}

/// Deep ensemble: one dropout-off pass per member, softmax rows averaged.
pub fn ensemble_predict(
    models: &[Model],
    inputs: &Matrix,
    keep_samples: bool,
    log_base: LogBase,
) -> Result<Vec<PredictiveDistribution>> {
    check_members(models)?;
    let member_probs: Vec<Matrix> = models
        .par_iter()
        .map(|m| m.predict_proba(inputs))
        .collect::<Result<_>>()?;
    let mut sums = Matrix::zeros(inputs.rows(), NUM_CLASSES);
    let mut samples = keep_samples.then(|| vec![Vec::with_capacity(models.len()); inputs.rows()]);
    for p in &member_probs {
        accumulate(&mut sums, p, samples.as_mut());
    }
    finish(&sums, models.len(), log_base, samples)
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    version: u32,
    spec: EnsembleSpec,
    members: Vec<MemberEntry>,
}

#[derive(Serialize, Deserialize)]
struct MemberEntry {
    file: String,
    seed: u64,
    hidden_sizes: Vec<usize>,
}

/// Writes `member_NNN.model.json` files plus a manifest into `dir`.
pub fn save_ensemble(dir: &Path, spec: &EnsembleSpec, models: &[Model]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| UqError::io(dir, e))?;
    let mut members = Vec::with_capacity(models.len());
    for (i, m) in models.iter().enumerate() {
        let file = format!("member_{i:03}{MODEL_EXTENSION}");
        nn::save_model(m, &dir.join(&file))?;
        members.push(MemberEntry {
            file,
            seed: m.arch.seed,
            hidden_sizes: m.arch.hidden_sizes.clone(),
        });
    }
    let manifest = Manifest {
        format: "uqlab-ensemble".into(),
        version: 1,
        spec: spec.clone(),
        members,
    };
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| UqError::json("manifest", e))?;
    let path = dir.join(ENSEMBLE_MANIFEST);
    fs::write(&path, text).map_err(|e| UqError::io(&path, e))
}

pub fn load_ensemble(dir: &Path) -> Result<(EnsembleSpec, Vec<Model>)> {
    let path = dir.join(ENSEMBLE_MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| UqError::io(&path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| UqError::json("manifest", e))?;
    if manifest.format != "uqlab-ensemble" {
        return Err(UqError::config("not an ensemble manifest"));
    }
    let models = manifest
        .members
        .iter()
        .map(|m| {
            let model = nn::load_model(&dir.join(&m.file))?;
            if model.arch.seed != m.seed || model.arch.hidden_sizes != m.hidden_sizes {
                return Err(UqError::config(format!(
                    "{} does not match its manifest entry",
                    m.file
                )));
            }
            Ok(model)
        })
        .collect::<Result<Vec<_>>>()?;
    check_members(&models)?;
    Ok((manifest.spec, models))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_is_deterministic() {
        let spec = EnsembleSpec::paper(17);
        let a = build_ensemble(&spec, 10, 0.75).unwrap();
        assert_eq!(a, build_ensemble(&spec, 10, 0.75).unwrap());
        assert_eq!(a.len(), 30);
        let one = EnsembleSpec {
            member_count: 1,
            ..spec
        };
        assert_eq!(build_ensemble(&one, 10, 0.75).unwrap().len(), 1);
    }

    #[test]
    fn depth_and_width_frequencies() {
        let spec = EnsembleSpec {
            member_count: 10_000,
            ..EnsembleSpec::paper(3)
        };
        let archs = build_ensemble(&spec, 4, 0.75).unwrap();
        let depth2 = archs.iter().filter(|a| a.hidden_sizes.len() == 2).count();
        let frac = depth2 as f64 / archs.len() as f64;
        assert!((0.49..=0.51).contains(&frac), "depth-2 fraction {frac}");
        for a in &archs {
            assert!((512..=1024).contains(&a.hidden_sizes[0]));
            assert!((128..=512).contains(&a.hidden_sizes[1]));
            if let Some(&w) = a.hidden_sizes.get(2) {
                assert!((8..=128).contains(&w));
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = EnsembleSpec::paper(0);
        s.depth_choices.clear();
        assert!(matches!(build_ensemble(&s, 4, 0.75), Err(UqError::Config(_))));
        let mut s = EnsembleSpec::paper(0);
        s.width_ranges[1] = (10, 10);
        assert!(s.validate().is_err());
        let mut s = EnsembleSpec::paper(0);
        s.depth_choices = vec![4];
        assert!(s.validate().is_err());
        let mut s = EnsembleSpec::paper(0);
        s.member_count = 0;
        assert!(s.validate().is_err());
    }
}
