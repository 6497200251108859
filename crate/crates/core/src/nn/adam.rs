use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, MlpParams};
use crate::error::{Result, UqError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first_moment: MlpParams,
    pub second_moment: MlpParams,
    pub step: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Zeroed moments shaped like `params`, with beta1 0.9, beta2 0.999, eps 1e-8.
    pub fn new(params: &MlpParams, learning_rate: f64) -> Self {
        Self {
            first_moment: params.zeros_like(),
            second_moment: params.zeros_like(),
            step: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut MlpParams, grads: &Gradients) -> Result<()> {
        if !params.same_shape(grads)
            || !params.same_shape(&self.first_moment)
            || !params.same_shape(&self.second_moment)
        {
            return Err(UqError::dim("Adam: parameter, gradient and moment shapes differ"));
        }
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);

        let g = grads.flat();
        let mut m = self.first_moment.flat();
        let mut v = self.second_moment.flat();
        params.for_each_mut(|k, p| {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        });
        self.first_moment.for_each_mut(|k, x| *x = m[k]);
        self.second_moment.for_each_mut(|k, x| *x = v[k]);
        Ok(())
    }
}
