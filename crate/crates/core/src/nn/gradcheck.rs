//! Central-difference gradient oracle for checking [`backward`](super::backward).

use super::loss::{cross_entropy_loss, softmax};
use super::matrix::Matrix;
use super::mlp::{forward, Dropout, Gradients, MlpParams};
use crate::error::{Result, UqError};

fn loss_at(params: &MlpParams, batch: &Matrix, labels: &[usize], masks: Option<&[Matrix]>) -> Result<f64> {
    let dropout = match masks {
        Some(m) => Dropout::Frozen(m),
        None => Dropout::Off,
    };
    let (logits, _) = forward(params, batch, dropout)?;
    cross_entropy_loss(&softmax(&logits), labels)
}

/// `(L(θ + h·e_k) − L(θ − h·e_k)) / 2h` for every parameter `k`.
///
/// `masks` freezes dropout so every evaluation sees the same network.
pub fn finite_difference_grad(
    params: &MlpParams,
    batch: &Matrix,
    labels: &[usize],
    h: f64,
    masks: Option<&[Matrix]>,
) -> Result<Gradients> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(UqError::config(format!("step h must be positive, got {h}")));
    }
    let base = params.flat();
    let mut grads = params.zeros_like();
    let mut probe = params.clone();
    let mut out = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        probe.for_each_mut(|j, v| {
            if j == k {
                *v = base[k] + h;
            }
        });
        let plus = loss_at(&probe, batch, labels, masks)?;
        probe.for_each_mut(|j, v| {
            if j == k {
                *v = base[k] - h;
            }
        });
        let minus = loss_at(&probe, batch, labels, masks)?;
        probe.for_each_mut(|j, v| {
            if j == k {
                *v = base[k];
            }
        });
        out.push((plus - minus) / (2.0 * h));
    }
    grads.for_each_mut(|k, v| *v = out[k]);
    Ok(grads)
}

/// `max_k |a_k − b_k| / max(|a_k|, |b_k|, floor)`.
pub fn max_relative_error(a: &Gradients, b: &Gradients, floor: f64) -> f64 {
    a.flat()
        .iter()
        .zip(b.flat())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}
