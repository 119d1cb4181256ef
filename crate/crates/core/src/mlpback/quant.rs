use super::float::{argmax, FloatMlp};
use crate::{Error, Result};

/// Scale of the network input: int8 `q` stands for `q / 128`.
pub const INPUT_SCALE: f64 = 1.0 / 128.0;

/// One int8 layer. `multiplier = input_scale * weight_scale / output_scale`
/// requantizes the int32 accumulator; the last layer keeps raw
/// accumulators as logits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantLayer {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<i8>,
    pub bias: Vec<i32>,
    pub weight_scale: f64,
    pub input_scale: f64,
    pub input_zero_point: i32,
    pub output_scale: f64,
    pub output_zero_point: i32,
}

impl QuantLayer {
    pub fn multiplier(&self) -> f64 {
        self.input_scale * self.weight_scale / self.output_scale
    }

    fn accumulate(&self, x: &[i8]) -> Vec<i32> {
        (0..self.n_out)
            .map(|o| {
                let row = &self.weights[o * self.n_in..(o + 1) * self.n_in];
                row.iter()
                    .zip(x)
                    .fold(self.bias[o], |acc, (&w, &v)| acc + w as i32 * (v as i32 - self.input_zero_point))
            })
            .collect()
    }
}

/// Integer network plus the float weights it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layers: Vec<QuantLayer>,
    pub float_reference: Option<FloatMlp<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpOutput {
    pub class: usize,
    pub logits: Vec<i32>,
}

impl MlpModel {
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.layers.first().map_or(0, |l| l.n_in)];
        d.extend(self.layers.iter().map(|l| l.n_out));
        d
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidInput("model has no layers".into()));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.n_in * l.n_out || l.bias.len() != l.n_out {
                return Err(Error::InvalidInput(format!("layer {i} shape mismatch")));
            }
            if !(l.weight_scale > 0.0 && l.input_scale > 0.0 && l.output_scale > 0.0) {
                return Err(Error::InvalidInput(format!("layer {i} scales must be positive")));
            }
            if i > 0 && self.layers[i - 1].n_out != l.n_in {
                return Err(Error::InvalidInput(format!("layer {i} input width mismatch")));
            }
        }
        Ok(())
    }
}

fn symmetric_scale(w: &[f64]) -> f64 {
    let max = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max > 0.0 { max / 127.0 } else { 1.0 }
}

fn requantize(acc: i32, multiplier: f64, zero_point: i32) -> i8 {
    let v = (acc as f64 * multiplier).round_ties_even() + zero_point as f64;
    v.clamp(-128.0, 127.0) as i8
}

/// Post-training int8 quantization. Weights are symmetric per tensor;
/// hidden activations are affine per tensor from the min/max seen over
/// the calibration inputs (always including zero).
pub fn quantize_mlp(model: &FloatMlp<f64>, calibration: &[Vec<f64>]) -> Result<MlpModel> {
    let n_layers = model.layers.len();
    let mut ranges = vec![(0.0f64, 0.0f64); n_layers];
    for x in calibration {
        let t = model.forward_trace(x);
        for (r, a) in ranges.iter_mut().zip(&t.post) {
            for &v in a {
                if !v.is_finite() {
                    return Err(Error::InvalidInput("non-finite activation during calibration".into()));
                }
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
    }
    let mut layers = Vec::with_capacity(n_layers);
    let (mut in_scale, mut in_zp) = (INPUT_SCALE, 0i32);
    for (i, l) in model.layers.iter().enumerate() {
        let s_w = symmetric_scale(&l.w);
        let weights = l.w.iter().map(|&w| (w / s_w).round_ties_even().clamp(-127.0, 127.0) as i8).collect();
        let bias = l
            .b
            .iter()
            .map(|&b| (b / (in_scale * s_w)).round_ties_even().clamp(i32::MIN as f64, i32::MAX as f64) as i32)
            .collect();
        let (out_scale, out_zp) = if i + 1 == n_layers {
            (in_scale * s_w, 0)
        } else {
            let (lo, hi) = ranges[i];
            let s = if hi > lo { (hi - lo) / 255.0 } else { 1.0 };
            (s, (-128.0 - lo / s).round_ties_even().clamp(-128.0, 127.0) as i32)
        };
        layers.push(QuantLayer {
            n_in: l.n_in,
            n_out: l.n_out,
            weights,
            bias,
            weight_scale: s_w,
            input_scale: in_scale,
            input_zero_point: in_zp,
            output_scale: out_scale,
            output_zero_point: out_zp,
        });
        in_scale = out_scale;
        in_zp = out_zp;
    }
    let q = MlpModel {
        layers,
        float_reference: Some(model.clone()),
    };
    q.validate()?;
    Ok(q)
}

/// Integer inference: int32 accumulation, real-multiplier requantization
/// with round-half-to-even and clamping, rectification at the zero point on
/// hidden layers. Logits are the final accumulators; ties pick the lowest
/// class.
pub fn mlp_infer(input: &[i8], model: &MlpModel) -> MlpOutput {
    assert_eq!(input.len(), model.layers[0].n_in, "input width");
    let last = model.layers.len() - 1;
    let mut x = input.to_vec();
    for layer in &model.layers[..last] {
        let m = layer.multiplier();
        x = layer
            .accumulate(&x)
            .into_iter()
            .map(|acc| requantize(acc, m, layer.output_zero_point).max(layer.output_zero_point.clamp(-128, 127) as i8))
            .collect();
    }
    let logits = model.layers[last].accumulate(&x);
    MlpOutput {
        class: argmax(&logits),
        logits,
    }
}
