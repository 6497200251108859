//! `.model.json` persistence.
//!
//! ```text
//! {
//!   "format": "uqlab-model",
//!   "version": 1,
//!   "architecture": { "input_dim", "hidden_sizes", "output_dim", "dropout_retain", "seed" },
//!   "layers": [ { "fan_in", "fan_out", "weights": [[fan_out floats] x fan_in], "bias": [fan_out floats] } ]
//! }
//! ```
//!
//! Every float is written in scientific notation with 17 significant digits,
//! which round-trips any `f64` exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::matrix::Matrix;
use super::mlp::{DenseLayer, MlpArchitecture, MlpParams};
use super::train::Model;
use crate::error::{Result, UqError};

pub const MODEL_EXTENSION: &str = ".model.json";
const FORMAT_TAG: &str = "uqlab-model";

/// `f64` in 17-significant-digit scientific notation.
pub fn format_f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn raw(v: f64) -> Box<RawValue> {
    RawValue::from_string(format_f17(v)).expect("finite floats format as JSON numbers")
}

fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    raw(*v).serialize(s)
}

fn ser_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| raw(*x)).collect::<Vec<_>>().serialize(s)
}

fn ser_rows<S: Serializer>(v: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter()
        .map(|row| row.iter().map(|x| raw(*x)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

#[derive(Serialize, Deserialize)]
struct ArchitectureBlock {
    input_dim: usize,
    hidden_sizes: Vec<usize>,
    output_dim: usize,
    #[serde(serialize_with = "ser_f64")]
    dropout_retain: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct LayerBlock {
    fan_in: usize,
    fan_out: usize,
    #[serde(serialize_with = "ser_rows")]
    weights: Vec<Vec<f64>>,
    #[serde(serialize_with = "ser_vec")]
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    architecture: ArchitectureBlock,
    layers: Vec<LayerBlock>,
}

pub fn model_to_json(model: &Model) -> Result<String> {
    if !model.params.is_finite() {
        return Err(UqError::data("refusing to persist non-finite parameters"));
    }
    let a = &model.arch;
    let file = ModelFile {
        format: FORMAT_TAG.to_string(),
        version: 1,
        architecture: ArchitectureBlock {
            input_dim: a.input_dim,
            hidden_sizes: a.hidden_sizes.clone(),
            output_dim: a.output_dim,
            dropout_retain: a.dropout_retain,
            seed: a.seed,
        },
        layers: model
            .params
            .layers
            .iter()
            .map(|l| LayerBlock {
                fan_in: l.fan_in(),
                fan_out: l.fan_out(),
                weights: l.weights.iter_rows().map(<[f64]>::to_vec).collect(),
                bias: l.bias.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| UqError::json("model", e))
}

pub fn model_from_json(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| UqError::json("model", e))?;
    if file.format != FORMAT_TAG {
        return Err(UqError::config(format!(
            "not a model file: format tag {:?}",
            file.format
        )));
    }
    let a = file.architecture;
    let arch = MlpArchitecture {
        input_dim: a.input_dim,
        hidden_sizes: a.hidden_sizes,
        output_dim: a.output_dim,
        dropout_retain: a.dropout_retain,
        seed: a.seed,
    };
    arch.validate()?;
    let sizes = arch.layer_sizes();
    if file.layers.len() + 1 != sizes.len() {
        return Err(UqError::dim(format!(
            "architecture implies {} layers, file has {}",
            sizes.len() - 1,
            file.layers.len()
        )));
    }
    let mut layers = Vec::with_capacity(file.layers.len());
    for (i, (l, w)) in file.layers.into_iter().zip(sizes.windows(2)).enumerate() {
        if l.fan_in != w[0] || l.fan_out != w[1] || l.weights.len() != l.fan_in {
            return Err(UqError::dim(format!("layer {i} shape disagrees with architecture")));
        }
        let weights = Matrix::from_rows(&l.weights)?;
        if weights.cols() != l.fan_out || l.bias.len() != l.fan_out {
            return Err(UqError::dim(format!("layer {i} shape disagrees with architecture")));
        }
        layers.push(DenseLayer {
            weights,
            bias: l.bias,
        });
    }
    let params = MlpParams { layers };
    if !params.is_finite() {
        return Err(UqError::data("model file contains non-finite parameters"));
    }
    Ok(Model { arch, params })
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    let text = model_to_json(model)?;
    fs::write(path, text).map_err(|e| UqError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|e| UqError::io(path, e))?;
    model_from_json(&text)
}
