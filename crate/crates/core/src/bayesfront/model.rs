use std::path::Path;

use serde::{Deserialize, Serialize};

use super::codec::LogCodec;
use super::infer::WordAddress;
use super::likelihood::fit_likelihoods;
use crate::datapipe::{fit_quantizer, quantize, BeatClass, FeatureVector, QuantizerSpec, RankedBin};
use crate::{Error, Result};

pub const N_FEATURES: usize = 4;
pub const N_LEVELS: usize = 8;
pub const N_WORDS: usize = BeatClass::COUNT * N_FEATURES * N_LEVELS;

/// Fractional bits of the hardware probability decode; a winning score at
/// or beyond this underflow is reported as invalid.
pub(crate) const DECODE_FRAC_BITS: u32 = 16;

/// Hardware-shaped front-end model: 4 classes x 4 features x 8 levels of
/// 8-bit words. `codes` is class-major, then feature, then level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesModel {
    pub codec: LogCodec<f64>,
    pub feature_bins: [usize; N_FEATURES],
    pub quantizers: [QuantizerSpec; N_FEATURES],
    pub codes: Vec<u8>,
    pub class_names: Vec<String>,
}

impl BayesModel {
    pub fn validate(&self) -> Result<()> {
        self.codec.validate()?;
        if self.codes.len() != N_WORDS {
            return Err(Error::InvalidInput(format!("model needs {N_WORDS} codes, has {}", self.codes.len())));
        }
        for (i, a) in self.feature_bins.iter().enumerate() {
            if self.feature_bins[..i].contains(a) {
                return Err(Error::InvalidInput(format!("feature bin {a} selected twice")));
            }
        }
        for q in &self.quantizers {
            q.validate()?;
            if q.levels != N_LEVELS {
                return Err(Error::InvalidInput(format!("front-end quantizers need {N_LEVELS} levels")));
            }
        }
        if self.class_names.len() != BeatClass::COUNT {
            return Err(Error::InvalidInput("model needs four class names".into()));
        }
        Ok(())
    }

    pub fn code(&self, addr: WordAddress) -> u8 {
        self.codes[addr.flat()]
    }

    /// Quantized levels of the four selected bins.
    pub fn levels(&self, features: &FeatureVector) -> [usize; N_FEATURES] {
        std::array::from_fn(|f| quantize(features.mags[self.feature_bins[f]], &self.quantizers[f]))
    }

    /// Minimum winning score treated as an invalid (underflowed) output.
    pub fn invalid_threshold(&self) -> u16 {
        self.codec.underflow_threshold(DECODE_FRAC_BITS)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Builds the front end from ranked bins: keeps the top four, fits one
/// quantizer per bin, smooths the level histograms and encodes all words.
/// Class priors are uniform and left out of the scores.
pub fn fit_bayes_model(
    features: &[FeatureVector],
    labels: &[usize],
    ranked: &[RankedBin],
    codec: LogCodec<f64>,
    kernel_sigma: f64,
) -> Result<BayesModel> {
    codec.validate()?;
    if ranked.len() < N_FEATURES {
        return Err(Error::InvalidInput(format!("need {N_FEATURES} ranked bins, got {}", ranked.len())));
    }
    let feature_bins: [usize; N_FEATURES] = std::array::from_fn(|f| ranked[f].bin);
    let mut quantizers = Vec::with_capacity(N_FEATURES);
    for &bin in &feature_bins {
        let values: Vec<f64> = features.iter().map(|f| f.mags[bin]).collect();
        quantizers.push(fit_quantizer(&values, labels, N_LEVELS)?);
    }
    let quantizers: [QuantizerSpec; N_FEATURES] = quantizers.try_into().expect("four quantizers");
    let levels: Vec<Vec<usize>> = features
        .iter()
        .map(|fv| {
            feature_bins
                .iter()
                .zip(&quantizers)
                .map(|(&b, q)| quantize(fv.mags[b], q))
                .collect()
        })
        .collect();
    let probs = fit_likelihoods(&levels, labels, BeatClass::COUNT, N_LEVELS, kernel_sigma)?;
    let mut codes = Vec::with_capacity(N_WORDS);
    for per_class in &probs {
        for per_feature in per_class {
            for &p in per_feature {
                codes.push(codec.encode(p)?);
            }
        }
    }
    let model = BayesModel {
        codec,
        feature_bins,
        quantizers,
        codes,
        class_names: BeatClass::ALL.iter().map(|c| c.name().to_string()).collect(),
    };
    model.validate()?;
    Ok(model)
}
