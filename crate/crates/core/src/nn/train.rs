use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::loss::{cross_entropy_loss, softmax};
use super::matrix::Matrix;
use super::mlp::{backward, forward, init_params, Dropout, MlpArchitecture, MlpParams};
use crate::data::Dataset;
use crate::error::{Result, UqError};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch_size: 32,
            learning_rate: 0.001,
        }
    }
}

/// A trained network. Immutable once built, so it can be shared across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub arch: MlpArchitecture,
    pub params: MlpParams,
}

impl Model {
    pub fn input_dim(&self) -> usize {
        self.arch.input_dim
    }

    /// Deterministic class probabilities, dropout off.
    pub fn predict_proba(&self, inputs: &Matrix) -> Result<Matrix> {
        let (logits, _) = forward(&self.params, inputs, Dropout::Off)?;
        Ok(softmax(&logits))
    }

    /// One stochastic pass with dropout active at the model's retain rate.
    pub fn sample_proba(&self, inputs: &Matrix, rng: &mut RngStream) -> Result<Matrix> {
        let (logits, _) = forward(
            &self.params,
            inputs,
            Dropout::Sample {
                retain: self.arch.dropout_retain,
                rng,
            },
        )?;
        Ok(softmax(&logits))
    }

    /// Mean cross-entropy over `data`, dropout off.
    pub fn loss(&self, data: &Dataset) -> Result<f64> {
        cross_entropy_loss(&self.predict_proba(&data.features)?, &data.labels)
    }
}

/// Mini-batch Adam on cross-entropy with dropout active. Parameters are
/// initialized from `rng`, which then drives per-epoch shuffles and masks.
pub fn train(
    arch: &MlpArchitecture,
    data: &Dataset,
    config: &TrainConfig,
    rng: &mut RngStream,
) -> Result<Model> {
    run(arch, data, config, rng, None)
}

/// As [`train`], also returning the full-data loss (dropout off) after each epoch.
pub fn train_with_history(
    arch: &MlpArchitecture,
    data: &Dataset,
    config: &TrainConfig,
    rng: &mut RngStream,
) -> Result<(Model, Vec<f64>)> {
    let mut history = Vec::with_capacity(config.epochs);
    let model = run(arch, data, config, rng, Some(&mut history))?;
    Ok((model, history))
}

fn run(
    arch: &MlpArchitecture,
    data: &Dataset,
    config: &TrainConfig,
    rng: &mut RngStream,
    mut history: Option<&mut Vec<f64>>,
) -> Result<Model> {
    arch.validate()?;
    if data.is_empty() {
        return Err(UqError::data("cannot train on an empty dataset"));
    }
    if data.dims() != arch.input_dim {
        return Err(UqError::dim(format!(
            "dataset has {} features, architecture expects {}",
            data.dims(),
            arch.input_dim
        )));
    }
    if config.batch_size == 0 {
        return Err(UqError::config("batch_size must be at least 1"));
    }
    if !(config.learning_rate.is_finite() && config.learning_rate > 0.0) {
        return Err(UqError::config("learning_rate must be positive"));
    }

    let mut params = init_params(arch, rng)?;
    let mut adam = AdamState::new(&params, config.learning_rate);
    let mut order: Vec<usize> = (0..data.len()).collect();

    for _ in 0..config.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(config.batch_size) {
            let x = data.features.select_rows(chunk);
            let y: Vec<usize> = chunk.iter().map(|&i| data.labels[i]).collect();
            let dropout = if arch.dropout_retain < 1.0 {
                Dropout::Sample {
                    retain: arch.dropout_retain,
                    rng: &mut *rng,
                }
            } else {
                Dropout::Off
            };
            let (_, cache) = forward(&params, &x, dropout)?;
            let grads = backward(&params, &cache, &y)?;
            adam.step(&mut params, &grads)?;
        }
        if !params.is_finite() {
            return Err(UqError::data("training diverged to non-finite parameters"));
        }
        if let Some(h) = history.as_deref_mut() {
            let (logits, _) = forward(&params, &data.features, Dropout::Off)?;
            h.push(cross_entropy_loss(&softmax(&logits), &data.labels)?);
        }
    }

    Ok(Model {
        arch: arch.clone(),
        params,
    })
}
