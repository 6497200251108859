use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{emcd_predict, ensemble_predict, mcd_predict, LogBase, PredictiveDistribution};
use crate::error::{Result, UqError};
use crate::nn::{Matrix, Model};
use crate::rng::RngStream;

/// Which trained models a predictor consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelPool {
    /// Exactly one network.
    Single,
    /// The randomized ensemble members.
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictOptions {
    /// Stochastic forward passes per network; ignored by deterministic predictors.
    pub mc_samples: usize,
    pub seed: u64,
    pub keep_samples: bool,
    pub log_base: LogBase,
}

impl Default for PredictOptions {
    fn default() -> Self {
        Self {
            mc_samples: 200,
            seed: 0,
            keep_samples: false,
            log_base: LogBase::Natural,
        }
    }
}

pub trait UncertaintyPredictor: Send + Sync {
    fn name(&self) -> &'static str;

    fn model_pool(&self) -> ModelPool;

    fn predict(
        &self,
        models: &[Model],
        inputs: &Matrix,
        opts: &PredictOptions,
    ) -> Result<Vec<PredictiveDistribution>>;
}

/// MC dropout over a single network. Masks come from `RngStream(seed, 0)`.
pub struct McdPredictor;

impl UncertaintyPredictor for McdPredictor {
    fn name(&self) -> &'static str {
        "mcd"
    }

    fn model_pool(&self) -> ModelPool {
        ModelPool::Single
    }

    fn predict(
        &self,
        models: &[Model],
        inputs: &Matrix,
        opts: &PredictOptions,
    ) -> Result<Vec<PredictiveDistribution>> {
        let [model] = models else {
            return Err(UqError::config(format!(
                "mcd runs on exactly one model, got {}",
                models.len()
            )));
        };
        let mut rng = RngStream::new(opts.seed, 0);
        mcd_predict(model, inputs, opts.mc_samples, &mut rng, opts.keep_samples, opts.log_base)
    }
}

pub struct EnsemblePredictor;

impl UncertaintyPredictor for EnsemblePredictor {
    fn name(&self) -> &'static str {
        "ensemble"
    }

    fn model_pool(&self) -> ModelPool {
        ModelPool::Ensemble
    }

    fn predict(
        &self,
        models: &[Model],
        inputs: &Matrix,
        opts: &PredictOptions,
    ) -> Result<Vec<PredictiveDistribution>> {
        ensemble_predict(models, inputs, opts.keep_samples, opts.log_base)
    }
}

pub struct EmcdPredictor;

impl UncertaintyPredictor for EmcdPredictor {
    fn name(&self) -> &'static str {
        "emcd"
    }

    fn model_pool(&self) -> ModelPool {
        ModelPool::Ensemble
    }

    fn predict(
        &self,
        models: &[Model],
        inputs: &Matrix,
        opts: &PredictOptions,
    ) -> Result<Vec<PredictiveDistribution>> {
        emcd_predict(models, inputs, opts.mc_samples, opts.seed, opts.keep_samples, opts.log_base)
    }
}

/// Name → predictor lookup.
#[derive(Clone)]
pub struct PredictorRegistry {
    entries: BTreeMap<&'static str, Arc<dyn UncertaintyPredictor>>,
    order: Vec<&'static str>,
}

impl Default for PredictorRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(McdPredictor));
        r.register(Arc::new(EnsemblePredictor));
        r.register(Arc::new(EmcdPredictor));
        r
    }
}

impl PredictorRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Adds or replaces a predictor under its own name.
    pub fn register(&mut self, predictor: Arc<dyn UncertaintyPredictor>) {
        let name = predictor.name();
        if self.entries.insert(name, predictor).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn UncertaintyPredictor>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            UqError::config(format!(
                "unknown method {name:?}; available: {}",
                self.order.join(", ")
            ))
        })
    }

    /// Names in registration order.
    pub fn names(&self) -> &[&'static str] {
        &self.order
    }

    /// Expands `"all"` and checks every other name, keeping registration order
    /// and dropping duplicates.
    pub fn resolve(&self, selection: &[String]) -> Result<Vec<Arc<dyn UncertaintyPredictor>>> {
        let wanted: Vec<&str> = if selection.iter().any(|s| s == "all") {
            self.order.clone()
        } else {
            for s in selection {
                self.get(s)?;
            }
            self.order
                .iter()
                .copied()
                .filter(|n| selection.iter().any(|s| s == n))
                .collect()
        };
        wanted.into_iter().map(|n| self.get(n)).collect()
    }
}
