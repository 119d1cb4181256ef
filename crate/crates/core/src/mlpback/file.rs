use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::float::{DenseLayer, FloatMlp};
use super::input::InputQuantizer;
use super::quant::{MlpModel, QuantLayer};
use crate::{Error, Result};

/// Trained back end: input quantizer plus integer network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpBackendModel {
    pub input: InputQuantizer,
    pub model: MlpModel,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    shape: [usize; 2],
    weights: String,
    bias: String,
    weight_scale: f64,
    input_scale: f64,
    input_zero_point: i32,
    output_scale: f64,
    output_zero_point: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    float_weights: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    float_bias: Option<String>,
}

/// On-disk layout. Blobs are base64, row-major `[out][in]`, little endian
/// (int8 weights, int32 biases, f64 reference values).
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    dims: Vec<usize>,
    activation: String,
    input: InputQuantizer,
    layers: Vec<LayerFile>,
}

fn decode(text: &str, what: &str) -> Result<Vec<u8>> {
    STANDARD.decode(text).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

fn f64_blob(v: &[f64]) -> String {
    STANDARD.encode(v.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>())
}

fn f64_unblob(text: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let bytes = decode(text, what)?;
    if bytes.len() != n * 8 {
        return Err(Error::InvalidInput(format!("{what}: expected {n} values")));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

impl MlpBackendModel {
    pub fn to_json(&self) -> Result<String> {
        let reference = self.model.float_reference.as_ref();
        let layers = self
            .model
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| LayerFile {
                shape: [l.n_out, l.n_in],
                weights: STANDARD.encode(l.weights.iter().map(|&w| w as u8).collect::<Vec<u8>>()),
                bias: STANDARD.encode(l.bias.iter().flat_map(|b| b.to_le_bytes()).collect::<Vec<u8>>()),
                weight_scale: l.weight_scale,
                input_scale: l.input_scale,
                input_zero_point: l.input_zero_point,
                output_scale: l.output_scale,
                output_zero_point: l.output_zero_point,
                float_weights: reference.map(|r| f64_blob(&r.layers[i].w)),
                float_bias: reference.map(|r| f64_blob(&r.layers[i].b)),
            })
            .collect();
        let file = ModelFile {
            dims: self.model.dims(),
            activation: "relu".into(),
            input: self.input.clone(),
            layers,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.activation != "relu" {
            return Err(Error::InvalidInput(format!("unsupported activation '{}'", file.activation)));
        }
        let mut layers = Vec::new();
        let mut float_layers = Vec::new();
        for (i, lf) in file.layers.iter().enumerate() {
            let [n_out, n_in] = lf.shape;
            let weights: Vec<i8> = decode(&lf.weights, "weights")?.into_iter().map(|b| b as i8).collect();
            let bias_bytes = decode(&lf.bias, "bias")?;
            if weights.len() != n_in * n_out || bias_bytes.len() != 4 * n_out {
                return Err(Error::InvalidInput(format!("layer {i} blob size does not match shape")));
            }
            let bias = bias_bytes.chunks_exact(4).map(|c| i32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
            if let (Some(w), Some(b)) = (&lf.float_weights, &lf.float_bias) {
                float_layers.push(DenseLayer {
                    n_in,
                    n_out,
                    w: f64_unblob(w, n_in * n_out, "float weights")?,
                    b: f64_unblob(b, n_out, "float bias")?,
                });
            }
            layers.push(QuantLayer {
                n_in,
                n_out,
                weights,
                bias,
                weight_scale: lf.weight_scale,
                input_scale: lf.input_scale,
                input_zero_point: lf.input_zero_point,
                output_scale: lf.output_scale,
                output_zero_point: lf.output_zero_point,
            });
        }
        let float_reference = (float_layers.len() == layers.len()).then_some(FloatMlp { layers: float_layers });
        let model = MlpModel { layers, float_reference };
        model.validate()?;
        if model.dims() != file.dims {
            return Err(Error::InvalidInput("declared dims do not match layers".into()));
        }
        if file.input.bins.len() != model.dims()[0] {
            return Err(Error::InvalidInput("input quantizer width does not match the network".into()));
        }
        Ok(Self { input: file.input, model })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
