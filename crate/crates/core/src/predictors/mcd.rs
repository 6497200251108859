use super::{accumulate, finish, LogBase, PredictiveDistribution};
use crate::error::{Result, UqError};
use crate::nn::{Matrix, Model, NUM_CLASSES};
use crate::rng::RngStream;

/// Monte-Carlo dropout: `mc_samples` stochastic passes with dropout active,
/// softmax rows averaged per input, entropy of the average.
pub fn mcd_predict(
    model: &Model,
    inputs: &Matrix,
    mc_samples: usize,
    rng: &mut RngStream,
    keep_samples: bool,
    log_base: LogBase,
) -> Result<Vec<PredictiveDistribution>> {
    let sums = mc_sums(model, inputs, mc_samples, rng, keep_samples)?;
    finish(&sums.0, mc_samples, log_base, sums.1)
}

/// Per-row pass samples: `[row][pass][class]`.
pub(crate) type PassSamples = Vec<Vec<Vec<f64>>>;

/// Summed pass probabilities plus, optionally, the raw passes.
pub(crate) type McSums = (Matrix, Option<PassSamples>);

/// Summed pass probabilities (and optionally the raw passes) for one model.
pub(crate) fn mc_sums(
    model: &Model,
    inputs: &Matrix,
    mc_samples: usize,
    rng: &mut RngStream,
    keep_samples: bool,
) -> Result<McSums> {
    if mc_samples == 0 {
        return Err(UqError::config("mc_samples must be at least 1"));
    }
    let mut sums = Matrix::zeros(inputs.rows(), NUM_CLASSES);
    let mut samples = keep_samples.then(|| vec![Vec::with_capacity(mc_samples); inputs.rows()]);
    for _ in 0..mc_samples {
        let probs = model.sample_proba(inputs, rng)?;
        accumulate(&mut sums, &probs, samples.as_mut());
    }
    Ok((sums, samples))
}
