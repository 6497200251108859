//! Feedforward classifier engine: dense layers, ReLU, inverted dropout,
//! softmax cross-entropy, backprop and Adam.

mod adam;
mod gradcheck;
mod loss;
mod matrix;
mod mlp;
mod persist;
mod train;

pub use adam::AdamState;
pub use gradcheck::{finite_difference_grad, max_relative_error};
pub use loss::{cross_entropy_loss, softmax, softmax_in_place, LOG_FLOOR};
pub use matrix::Matrix;
pub use mlp::{
    backward, forward, init_params, DenseLayer, Dropout, ForwardCache, Gradients,
    MlpArchitecture, MlpParams, NUM_CLASSES,
};
pub use persist::{format_f17, load_model, model_from_json, model_to_json, save_model, MODEL_EXTENSION};
pub use train::{train, train_with_history, Model, TrainConfig};
