//! Log-domain naive-Bayes front end.
//!
//! Four selected spectral features are quantized to eight levels each. For
//! every (class, feature, level) the model stores one 8-bit word
//! `n = round(m * log_B p)` of a Gaussian-smoothed likelihood, so a class
//! score is the sum of four words and the best class is the *smallest*
//! score (with `B < 1`, larger codes mean smaller probabilities).

mod codec;
mod infer;
mod likelihood;
mod model;

pub use codec::LogCodec;
pub use infer::{bayes_infer, ClassScores, IdealReader, ReadFault, WordAddress, WordReader};
pub use likelihood::{fit_likelihoods, Likelihoods, DEFAULT_KERNEL_SIGMA};
pub use model::{fit_bayes_model, BayesModel, N_FEATURES, N_LEVELS, N_WORDS};
