use serde::{Deserialize, Serialize};

use crate::datapipe::{percentile, FeatureVector, RankedBin};
use crate::{Error, Result};

pub const MLP_INPUTS: usize = 32;
const CLIP_LO_PERCENTILE: f64 = 0.5;
const CLIP_HI_PERCENTILE: f64 = 99.5;

/// Per-feature affine int8 quantizer for the back-end input. Values are
/// clipped to the training percentile range and mapped onto `[-128, 127]`;
/// the network sees `q / 128`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputQuantizer {
    pub bins: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl InputQuantizer {
    /// Uses the top `MLP_INPUTS` ranked bins.
    pub fn fit(features: &[FeatureVector], ranked: &[RankedBin]) -> Result<Self> {
        if ranked.len() < MLP_INPUTS {
            return Err(Error::InvalidInput(format!("need {MLP_INPUTS} ranked bins, got {}", ranked.len())));
        }
        if features.is_empty() {
            return Err(Error::InvalidInput("no calibration features".into()));
        }
        let bins: Vec<usize> = ranked[..MLP_INPUTS].iter().map(|r| r.bin).collect();
        let mut lo = Vec::with_capacity(MLP_INPUTS);
        let mut hi = Vec::with_capacity(MLP_INPUTS);
        for &bin in &bins {
            let mut v: Vec<f64> = features.iter().map(|f| f.get(bin)).collect();
            v.sort_by(f64::total_cmp);
            lo.push(percentile(&v, CLIP_LO_PERCENTILE));
            hi.push(percentile(&v, CLIP_HI_PERCENTILE));
        }
        Ok(Self { bins, lo, hi })
    }

    pub fn quantize(&self, features: &FeatureVector) -> Vec<i8> {
        self.bins
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&bin, (&lo, &hi))| {
                if !(hi > lo) {
                    return 0;
                }
                let t = ((features.get(bin) - lo) / (hi - lo)).clamp(0.0, 1.0);
                ((t * 255.0).round_ties_even() - 128.0) as i8
            })
            .collect()
    }

    pub fn to_float(q: &[i8]) -> Vec<f64> {
        q.iter().map(|&v| v as f64 / 128.0).collect()
    }
}
