use rayon::prelude::*;

use super::mcd::{mc_sums, McSums};
use super::{accumulate, finish, LogBase, PredictiveDistribution};
use crate::error::{Result, UqError};
use crate::nn::{Matrix, Model, NUM_CLASSES};
use crate::rng::RngStream;

/// Ensemble of MC-dropout members: each member's MC mean over `mc_samples`
/// passes, averaged uniformly across members, entropy of the grand mean.
///
/// Member `i` draws its masks from `RngStream::new(seed, i)`, so members are
/// evaluated in parallel with results identical to a serial loop.
pub fn emcd_predict(
    models: &[Model],
    inputs: &Matrix,
    mc_samples: usize,
    seed: u64,
    keep_samples: bool,
    log_base: LogBase,
) -> Result<Vec<PredictiveDistribution>> {
    super::ensemble::check_members(models)?;
    if mc_samples == 0 {
        return Err(UqError::config("mc_samples must be at least 1"));
    }
    let member_results: Vec<McSums> = models
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let mut rng = RngStream::new(seed, i as u64);
            mc_sums(m, inputs, mc_samples, &mut rng, keep_samples)
        })
        .collect::<Result<_>>()?;

    let mut grand = Matrix::zeros(inputs.rows(), NUM_CLASSES);
    let mut samples = keep_samples.then(|| vec![Vec::new(); inputs.rows()]);
    for (sums, member_samples) in member_results {
        let mut member_mean = sums;
        for v in member_mean.values_mut() {
            *v /= mc_samples as f64;
        }
        accumulate(&mut grand, &member_mean, None);
        if let (Some(all), Some(ms)) = (samples.as_mut(), member_samples) {
            for (dst, src) in all.iter_mut().zip(ms) {
                dst.extend(src);
            }
        }
    }
    finish(&grand, models.len(), log_base, samples)
}
