use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::{Result, UqError};
use crate::nn::Matrix;
use crate::rng::RngStream;

/// Two isotropic Gaussian classes of `n / 2` rows each. Class centres sit at
/// `∓ separation · noise_std / 2` on the first axis and 0 elsewhere; class 0
/// rows come first.
pub fn synthetic_blobs(
    n: usize,
    dims: usize,
    separation: f64,
    noise_std: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(UqError::config(format!("n must be even and at least 2, got {n}")));
    }
    if dims == 0 {
        return Err(UqError::config("dims must be at least 1"));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(UqError::config("separation must be finite and non-negative"));
    }
    let noise = Normal::new(0.0, noise_std)
        .map_err(|_| UqError::config(format!("invalid noise_std {noise_std}")))?;
    let offset = separation * noise_std / 2.0;
    let half = n / 2;
    let mut values = Vec::with_capacity(n * dims);
    let mut labels = Vec::with_capacity(n);
    for class in 0..2usize {
        let centre = if class == 0 { -offset } else { offset };
        for _ in 0..half {
            for j in 0..dims {
                let c = if j == 0 { centre } else { 0.0 };
                values.push(c + noise.sample(rng));
            }
            labels.push(class);
        }
    }
    let names = (0..dims).map(|j| format!("x{j}")).collect();
    Dataset::new(
        Matrix::from_vec(n, dims, values)?,
        labels,
        Some(names),
        format!(
            "synthetic_blobs(n={n}, dims={dims}, separation={separation}, noise_std={noise_std}, seed={})",
            rng.seed()
        ),
    )
}
