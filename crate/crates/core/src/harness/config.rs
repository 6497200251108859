use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::CsvFormat;
use crate::error::{Result, UqError};
use crate::nn::{MlpArchitecture, TrainConfig};
use crate::predictors::{EnsembleSpec, LogBase};

/// Environment variable that overrides the configured master seed.
pub const SEED_ENV: &str = "UQLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Small synthetic study that runs in seconds.
    Desk,
    /// Full-size hyperparameters: 512/256/64 network, 200 MC passes,
    /// 30 ensemble members, 100 repetitions.
    Paper,
}

impl std::str::FromStr for Profile {
    type Err = UqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(UqError::config(format!("unknown profile {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataSource {
    Synthetic {
        n: usize,
        dims: usize,
        separation: f64,
        noise_std: f64,
    },
    Csv {
        path: PathBuf,
        label_column: String,
        format: CsvFormat,
        /// JSON token → 0|1 map; the bundled HAM10000 mapping when absent.
        label_map: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub member_count: usize,
    pub depth_choices: Vec<usize>,
    pub width_ranges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Master seed; every random draw in a study derives from it.
    pub seed: u64,
    pub data: DataSource,
    pub train_fraction: f64,
    pub stratified: bool,
    pub standardize: bool,
    pub hidden_sizes: Vec<usize>,
    pub dropout_retain: f64,
    pub training: TrainConfig,
    /// Any of `mcd`, `ensemble`, `emcd`, or `all`.
    pub methods: Vec<String>,
    pub mc_samples: usize,
    pub ensemble: EnsembleConfig,
    pub thresholds: GridConfig,
    pub spotlight_threshold: f64,
    pub ece_bins: usize,
    pub entropy_bins: usize,
    pub log_base: LogBase,
    /// Independent base-model trainings for the repeated-run summary.
    pub repetitions: usize,
    pub write_svg: bool,
}

impl ExperimentConfig {
    pub fn desk() -> Self {
        Self {
            seed: 20_240_101,
            data: DataSource::Synthetic {
                n: 2000,
                dims: 10,
                separation: 3.0,
                noise_std: 1.0,
            },
            train_fraction: 0.8,
            stratified: false,
            standardize: true,
            hidden_sizes: vec![32, 16],
            dropout_retain: 0.75,
            training: TrainConfig {
                epochs: 20,
                batch_size: 32,
                learning_rate: 0.001,
            },
            methods: vec!["all".into()],
            mc_samples: 50,
            ensemble: EnsembleConfig {
                member_count: 5,
                depth_choices: vec![2, 3],
                width_ranges: vec![(32, 64), (16, 32), (8, 16)],
            },
            thresholds: GridConfig {
                start: 0.1,
                end: 0.9,
                step: 0.05,
            },
            spotlight_threshold: 0.4,
            ece_bins: 10,
            entropy_bins: 20,
            log_base: LogBase::Natural,
            repetitions: 10,
            write_svg: true,
        }
    }

    pub fn paper() -> Self {
        let spec = EnsembleSpec::paper(0);
        Self {
            hidden_sizes: vec![512, 256, 64],
            mc_samples: 200,
            ensemble: EnsembleConfig {
                member_count: spec.member_count,
                depth_choices: spec.depth_choices,
                width_ranges: spec.width_ranges,
            },
            repetitions: 100,
            ..Self::desk()
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Desk => Self::desk(),
            Profile::Paper => Self::paper(),
        }
    }

    /// Profile defaults overlaid with a (possibly partial) JSON document.
    pub fn from_json_over(profile: Profile, text: &str) -> Result<Self> {
        let overlay: Value =
            serde_json::from_str(text).map_err(|e| UqError::json("config", e))?;
        let mut base = serde_json::to_value(Self::for_profile(profile))
            .map_err(|e| UqError::json("config", e))?;
        merge(&mut base, overlay);
        let cfg: Self = serde_json::from_value(base).map_err(|e| UqError::json("config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(profile: Profile, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| UqError::io(path, e))?;
        Self::from_json_over(profile, &text)
    }

    pub fn validate(&self) -> Result<()> {
        self.base_architecture(1).validate()?;
        self.ensemble_spec().validate()?;
        if self.mc_samples == 0 {
            return Err(UqError::config("mc_samples must be at least 1"));
        }
        if self.training.batch_size == 0 {
            return Err(UqError::config("training.batch_size must be at least 1"));
        }
        if self.ece_bins == 0 || self.entropy_bins == 0 {
            return Err(UqError::config("bin counts must be at least 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(UqError::config("train_fraction must lie in (0, 1)"));
        }
        if !self.spotlight_threshold.is_finite() {
            return Err(UqError::config("spotlight_threshold must be finite"));
        }
        if self.methods.is_empty() && self.repetitions == 0 {
            return Err(UqError::config("nothing to run: no methods and zero repetitions"));
        }
        crate::metrics::threshold_grid(self.thresholds.start, self.thresholds.end, self.thresholds.step)?;
        Ok(())
    }

    pub fn base_architecture(&self, input_dim: usize) -> MlpArchitecture {
        MlpArchitecture::new(input_dim, self.hidden_sizes.clone(), self.dropout_retain, self.seed)
    }

    /// Member seeds start at the master seed, so member 0 shares the base
    /// model's training stream.
    pub fn ensemble_spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            member_count: self.ensemble.member_count,
            depth_choices: self.ensemble.depth_choices.clone(),
            width_ranges: self.ensemble.width_ranges.clone(),
            base_seed: self.seed,
        }
    }
}

/// Seed precedence: config < `UQLAB_SEED` < explicit flag.
pub fn resolve_seed(config_seed: u64, env_value: Option<&str>, flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env_value {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| UqError::config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(config_seed),
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                // A different tagged variant replaces the block wholesale.
                let replace = k == "data"
                    && b.get(&k).and_then(|x| x.get("kind")) != v.get("kind")
                    && v.get("kind").is_some();
                match b.get_mut(&k) {
                    Some(slot) if !replace => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
