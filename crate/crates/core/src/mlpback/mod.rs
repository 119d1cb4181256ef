//! Back-end classifier: a 32-74-100-4 MLP trained in floating point and
//! served with 8-bit integer arithmetic.

mod file;
mod float;
mod input;
mod quant;

pub use file::MlpBackendModel;
pub use float::{argmax, train_mlp, DenseLayer, FloatMlp, TrainConfig, Trace, TrainingCurve, MLP_DIMS};
pub use input::{InputQuantizer, MLP_INPUTS};
pub use quant::{mlp_infer, quantize_mlp, MlpModel, MlpOutput, QuantLayer, INPUT_SCALE};
