use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::loss::softmax;
use super::matrix::Matrix;
use crate::error::{Result, UqError};
use crate::rng::RngStream;

/// Binary output: cancer / non-cancer.
pub const NUM_CLASSES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    pub input_dim: usize,
    pub hidden_sizes: Vec<usize>,
    pub output_dim: usize,
    /// Probability of keeping a hidden unit; `1.0` disables dropout.
    pub dropout_retain: f64,
    pub seed: u64,
}

impl MlpArchitecture {
    pub fn new(input_dim: usize, hidden_sizes: Vec<usize>, dropout_retain: f64, seed: u64) -> Self {
        Self {
            input_dim,
            hidden_sizes,
            output_dim: NUM_CLASSES,
            dropout_retain,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(UqError::config("input_dim must be at least 1"));
        }
        if self.output_dim != NUM_CLASSES {
            return Err(UqError::config(format!(
                "output_dim must be {NUM_CLASSES}, got {}",
                self.output_dim
            )));
        }
        if let Some(i) = self.hidden_sizes.iter().position(|&h| h == 0) {
            return Err(UqError::config(format!("hidden layer {i} has width 0")));
        }
        if !(self.dropout_retain > 0.0 && self.dropout_retain <= 1.0) {
            return Err(UqError::config(format!(
                "dropout_retain must lie in (0, 1], got {}",
                self.dropout_retain
            )));
        }
        Ok(())
    }

    /// Layer widths from input to output.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.hidden_sizes.len() + 2);
        sizes.push(self.input_dim);
        sizes.extend_from_slice(&self.hidden_sizes);
        sizes.push(self.output_dim);
        sizes
    }
}

/// One dense layer: `z = x · weights + bias`, weights shaped `(fan_in, fan_out)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn fan_in(&self) -> usize {
        self.weights.rows()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.cols()
    }
}

/// Network parameters. Also used as the gradient container, since gradients
/// share the parameter shapes exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<DenseLayer>,
}

pub type Gradients = MlpParams;

impl MlpParams {
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer {
                    weights: Matrix::zeros(l.weights.rows(), l.weights.cols()),
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, DenseLayer::fan_in)
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.values().len() + l.bias.len())
            .sum()
    }

    /// All scalars, layer by layer, weights before bias.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(l.weights.values());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn for_each_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        let mut k = 0;
        for l in &mut self.layers {
            for v in l.weights.values_mut().iter_mut().chain(l.bias.iter_mut()) {
                f(k, v);
                k += 1;
            }
        }
    }

    pub fn same_shape(&self, other: &MlpParams) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.weights.rows() == b.weights.rows()
                    && a.weights.cols() == b.weights.cols()
                    && a.bias.len() == b.bias.len()
            })
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    /// Euclidean norm over every scalar.
    pub fn norm(&self) -> f64 {
        self.flat().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub(crate) fn check_chain(&self) -> Result<()> {
        for (i, pair) in self.layers.windows(2).enumerate() {
            if pair[0].fan_out() != pair[1].fan_in() {
                return Err(UqError::dim(format!(
                    "layer {i} outputs {} units but layer {} expects {}",
                    pair[0].fan_out(),
                    i + 1,
                    pair[1].fan_in()
                )));
            }
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.bias.len() != l.fan_out() {
                return Err(UqError::dim(format!(
                    "layer {i} bias has {} entries for {} outputs",
                    l.bias.len(),
                    l.fan_out()
                )));
            }
        }
        Ok(())
    }
}

/// He initialization: weights ~ N(0, 2 / fan_in), biases zero.
pub fn init_params(arch: &MlpArchitecture, rng: &mut RngStream) -> Result<MlpParams> {
    arch.validate()?;
    let sizes = arch.layer_sizes();
    let layers = sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt())
                .expect("fan_in is positive");
            let values = (0..fan_in * fan_out).map(|_| normal.sample(rng)).collect();
            DenseLayer {
                weights: Matrix::from_vec(fan_in, fan_out, values).expect("sized"),
                bias: vec![0.0; fan_out],
            }
        })
        .collect();
    Ok(MlpParams { layers })
}

/// How hidden-layer dropout behaves during a forward pass.
pub enum Dropout<'a> {
    Off,
    /// Fresh Bernoulli(retain) masks, rescaled by `1 / retain`.
    Sample { retain: f64, rng: &'a mut RngStream },
    /// Reuse previously drawn masks, one per hidden layer, already rescaled.
    Frozen(&'a [Matrix]),
}

/// Everything backprop needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Matrix,
    /// Hidden pre-activations `z`, one per hidden layer.
    pub pre_activations: Vec<Matrix>,
    /// Hidden outputs after ReLU and mask; these feed the next layer.
    pub hidden_outputs: Vec<Matrix>,
    /// Rescaled dropout masks, present only when dropout was applied.
    pub masks: Option<Vec<Matrix>>,
    pub logits: Matrix,
}

fn sample_mask(rows: usize, cols: usize, retain: f64, rng: &mut RngStream) -> Matrix {
    let scale = 1.0 / retain;
    let values = (0..rows * cols)
        .map(|_| if rng.uniform() < retain { scale } else { 0.0 })
        .collect();
    Matrix::from_vec(rows, cols, values).expect("sized")
}

pub fn forward(
    params: &MlpParams,
    batch: &Matrix,
    mut dropout: Dropout<'_>,
) -> Result<(Matrix, ForwardCache)> {
    params.check_chain()?;
    if batch.cols() != params.input_dim() {
        return Err(UqError::dim(format!(
            "batch has {} features, network expects {}",
            batch.cols(),
            params.input_dim()
        )));
    }
    let n_hidden = params.layers.len().saturating_sub(1);
    if let Dropout::Frozen(masks) = &dropout {
        if masks.len() != n_hidden {
            return Err(UqError::dim(format!(
                "{} frozen masks supplied for {n_hidden} hidden layers",
                masks.len()
            )));
        }
    }

    let mut pre_activations = Vec::with_capacity(n_hidden);
    let mut hidden_outputs = Vec::with_capacity(n_hidden);
    let mut masks = match dropout {
        Dropout::Off => None,
        _ => Some(Vec::with_capacity(n_hidden)),
    };

    let mut current = batch.clone();
    for (i, layer) in params.layers.iter().enumerate() {
        let mut z = current.matmul(&layer.weights)?;
        z.add_row_vector(&layer.bias)?;
        if i == n_hidden {
            current = z;
            break;
        }
        let mut a = z.clone();
        for v in a.values_mut() {
            *v = v.max(0.0);
        }
        let mask = match &mut dropout {
            Dropout::Off => None,
            Dropout::Sample { retain, rng } => Some(sample_mask(a.rows(), a.cols(), *retain, rng)),
            Dropout::Frozen(frozen) => {
                let m = &frozen[i];
                if m.rows() != a.rows() || m.cols() != a.cols() {
                    return Err(UqError::dim(format!(
                        "frozen mask {i} is {}x{}, activations are {}x{}",
                        m.rows(),
                        m.cols(),
                        a.rows(),
                        a.cols()
                    )));
                }
                Some(m.clone())
            }
        };
        if let Some(m) = mask {
            for (v, k) in a.values_mut().iter_mut().zip(m.values()) {
                *v *= k;
            }
            masks.as_mut().expect("dropout active").push(m);
        }
        pre_activations.push(z);
        hidden_outputs.push(a.clone());
        current = a;
    }

    let cache = ForwardCache {
        input: batch.clone(),
        pre_activations,
        hidden_outputs,
        masks,
        logits: current.clone(),
    };
    Ok((current, cache))
}

/// Analytic gradient of mean cross-entropy of `softmax(logits)` with respect
/// to every parameter. Dropout masks recorded in `cache` are held fixed.
pub fn backward(params: &MlpParams, cache: &ForwardCache, labels: &[usize]) -> Result<Gradients> {
    let n = cache.logits.rows();
    if labels.len() != n {
        return Err(UqError::dim(format!(
            "{} labels for a batch of {n}",
            labels.len()
        )));
    }
    if cache.hidden_outputs.len() + 1 != params.layers.len() {
        return Err(UqError::dim("cache does not match network depth"));
    }
    let classes = cache.logits.cols();
    let mut delta = softmax(&cache.logits);
    for (r, &y) in labels.iter().enumerate() {
        if y >= classes {
            return Err(UqError::data(format!("label {y} out of range")));
        }
        let row = delta.row_mut(r);
        row[y] -= 1.0;
        for v in row.iter_mut() {
            *v /= n as f64;
        }
    }

    let mut grads = params.zeros_like();
    for i in (0..params.layers.len()).rev() {
        let layer_input = if i == 0 {
            &cache.input
        } else {
            &cache.hidden_outputs[i - 1]
        };
        grads.layers[i].weights = layer_input.t_matmul(&delta)?;
        grads.layers[i].bias = delta.column_sums();
        if i == 0 {
            break;
        }
        let mut upstream = delta.matmul_t(&params.layers[i].weights)?;
        let h = i - 1;
        if let Some(masks) = &cache.masks {
            for (g, m) in upstream.values_mut().iter_mut().zip(masks[h].values()) {
                *g *= m;
            }
        }
        for (g, z) in upstream
            .values_mut()
            .iter_mut()
            .zip(cache.pre_activations[h].values())
        {
            if *z <= 0.0 {
                *g = 0.0;
            }
        }
        delta = upstream;
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(hidden: Vec<usize>) -> MlpArchitecture {
        MlpArchitecture::new(3, hidden, 0.75, 7)
    }

    #[test]
    fn init_is_deterministic_with_zero_bias() {
        let a = arch(vec![4]);
        let p1 = init_params(&a, &mut RngStream::new(7, 0)).unwrap();
        let p2 = init_params(&a, &mut RngStream::new(7, 0)).unwrap();
        assert_eq!(p1, p2);
        assert!(p1.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
        assert_eq!(p1.layers[0].weights.rows(), 3);
        assert_eq!(p1.layers[1].weights.cols(), 2);
    }

    #[test]
    fn invalid_architectures_rejected() {
        let mut bad = arch(vec![4, 0]);
        assert!(matches!(
            init_params(&bad, &mut RngStream::new(0, 0)),
            Err(UqError::Config(_))
        ));
        bad = arch(vec![4]);
        bad.input_dim = 0;
        assert!(bad.validate().is_err());
        bad = arch(vec![4]);
        bad.dropout_retain = 0.0;
        assert!(bad.validate().is_err());
        bad = arch(vec![4]);
        bad.output_dim = 3;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn he_std_matches_fan_in() {
        let a = MlpArchitecture::new(2352, vec![512, 256, 64], 0.75, 1);
        let p = init_params(&a, &mut RngStream::new(1, 0)).unwrap();
        let w = p.layers[0].weights.values();
        assert!(w.len() >= 100_000);
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
        let target = (2.0f64 / 2352.0).sqrt();
        assert!((var.sqrt() / target - 1.0).abs() < 0.05);
    }

    #[test]
    fn retain_one_matches_dropout_off() {
        let a = MlpArchitecture::new(3, vec![5, 4], 1.0, 3);
        let p = init_params(&a, &mut RngStream::new(3, 0)).unwrap();
        let x = Matrix::from_rows(&[vec![0.5, -1.0, 2.0], vec![1.0, 1.0, 1.0]]).unwrap();
        let (off, _) = forward(&p, &x, Dropout::Off).unwrap();
        let mut rng = RngStream::new(9, 9);
        let (on, _) = forward(&p, &x, Dropout::Sample { retain: 1.0, rng: &mut rng }).unwrap();
        assert_eq!(off, on);
    }

    #[test]
    fn zero_params_give_zero_logits() {
        let a = arch(vec![4, 4]);
        let p = init_params(&a, &mut RngStream::new(1, 0)).unwrap().zeros_like();
        let x = Matrix::from_rows(&[vec![9.0, -3.0, 1e3]]).unwrap();
        let (logits, _) = forward(&p, &x, Dropout::Off).unwrap();
        assert!(logits.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relu_clamps_negative_input() {
        let p = MlpParams {
            layers: vec![
                DenseLayer {
                    weights: Matrix::from_vec(1, 1, vec![1.0]).unwrap(),
                    bias: vec![0.0],
                },
                DenseLayer {
                    weights: Matrix::from_vec(1, 2, vec![1.0, -1.0]).unwrap(),
                    bias: vec![0.0, 0.0],
                },
            ],
        };
        let x = Matrix::from_vec(1, 1, vec![-3.0]).unwrap();
        let (_, cache) = forward(&p, &x, Dropout::Off).unwrap();
        assert_eq!(cache.hidden_outputs[0].values(), &[0.0]);
    }

    #[test]
    fn wrong_input_width_is_dimension_error() {
        let p = init_params(&arch(vec![4]), &mut RngStream::new(1, 0)).unwrap();
        let x = Matrix::zeros(2, 5);
        assert!(matches!(
            forward(&p, &x, Dropout::Off),
            Err(UqError::Dimension(_))
        ));
    }

    #[test]
    fn backward_rejects_label_count_mismatch() {
        let p = init_params(&arch(vec![4]), &mut RngStream::new(1, 0)).unwrap();
        let x = Matrix::zeros(2, 3);
        let (_, cache) = forward(&p, &x, Dropout::Off).unwrap();
        assert!(matches!(
            backward(&p, &cache, &[0]),
            Err(UqError::Dimension(_))
        ));
    }

    #[test]
    fn inverted_dropout_preserves_expectation() {
        let retain = 0.75;
        let a = 2.5;
        let mut rng = RngStream::new(11, 0);
        let mask = sample_mask(1, 100_000, retain, &mut rng);
        let mean = mask.values().iter().map(|m| m * a).sum::<f64>() / 100_000.0;
        assert!((mean / a - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn zero_signal_gives_zero_gradient() {
        // Huge logit margin in favour of the true class: softmax is one-hot.
        let p = MlpParams {
            layers: vec![
                DenseLayer {
                    weights: Matrix::from_vec(1, 1, vec![1.0]).unwrap(),
                    bias: vec![0.0],
                },
                DenseLayer {
                    weights: Matrix::from_vec(1, 2, vec![100.0, -100.0]).unwrap(),
                    bias: vec![0.0, 0.0],
                },
            ],
        };
        let x = Matrix::from_vec(2, 1, vec![5.0, 7.0]).unwrap();
        let (_, cache) = forward(&p, &x, Dropout::Off).unwrap();
        let g = backward(&p, &cache, &[0, 0]).unwrap();
        assert!(g.norm() < 1e-8, "norm {}", g.norm());
    }

    #[test]
    fn duplicated_batch_has_same_mean_gradient() {
        let a = arch(vec![6, 4]);
        let p = init_params(&a, &mut RngStream::new(5, 0)).unwrap();
        let rows = vec![vec![0.1, -0.4, 1.2], vec![-1.0, 0.3, 0.7], vec![0.9, 0.9, -0.2]];
        let labels = vec![0, 1, 1];
        let x = Matrix::from_rows(&rows).unwrap();
        let x2 = x.vstack(&x).unwrap();
        let labels2: Vec<usize> = labels.iter().chain(&labels).copied().collect();
        let (_, c1) = forward(&p, &x, Dropout::Off).unwrap();
        let (_, c2) = forward(&p, &x2, Dropout::Off).unwrap();
        let g1 = backward(&p, &c1, &labels).unwrap().flat();
        let g2 = backward(&p, &c2, &labels2).unwrap().flat();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
