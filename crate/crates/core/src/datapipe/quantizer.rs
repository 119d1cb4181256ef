use serde::{Deserialize, Serialize};

use super::chi2::{chi2_statistic, score_key};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub clip_lo: f64,
    pub clip_hi: f64,
    pub levels: usize,
}

impl QuantizerSpec {
    pub fn new(clip_lo: f64, clip_hi: f64, levels: usize) -> Result<Self> {
        let spec = Self { clip_lo, clip_hi, levels };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clip_lo < self.clip_hi) || self.levels < 2 {
            return Err(Error::InvalidInput(format!(
                "quantizer needs clip_lo < clip_hi and levels >= 2, got ({}, {}, {})",
                self.clip_lo, self.clip_hi, self.levels
            )));
        }
        Ok(())
    }

    pub fn quantize(&self, value: f64) -> usize {
        quantize(value, self)
    }
}

/// `clamp(floor((v - lo) / (hi - lo) * levels), 0, levels - 1)`; NaN maps to 0.
pub fn quantize(value: f64, spec: &QuantizerSpec) -> usize {
    let x = (value - spec.clip_lo) / (spec.clip_hi - spec.clip_lo) * spec.levels as f64;
    if !(x > 0.0) {
        return 0;
    }
    (x.floor() as usize).min(spec.levels - 1)
}

/// Linear-interpolation percentile of sorted data, `p` in [0, 100].
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (n - 1) as f64;
    let i = rank.floor() as usize;
    if i + 1 >= n {
        return sorted[n - 1];
    }
    let frac = rank - i as f64;
    sorted[i] + (sorted[i + 1] - sorted[i]) * frac
}

const LOWER_PCTS: [f64; 4] = [0.0, 1.0, 2.0, 5.0];
const UPPER_PCTS: [f64; 4] = [95.0, 98.0, 99.0, 100.0];

/// Picks clip percentiles from a fixed grid to maximize the chi-square of the
/// (level, class) table. Ties go to the widest range, then to grid order.
pub fn fit_quantizer(values: &[f64], labels: &[usize], levels: usize) -> Result<QuantizerSpec> {
    if values.len() != labels.len() || values.is_empty() {
        return Err(Error::InvalidInput("quantizer fit needs one label per value".into()));
    }
    if levels < 2 {
        return Err(Error::InvalidInput("quantizer needs at least two levels".into()));
    }
    let n_cls = labels.iter().max().map_or(1, |&m| m + 1);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::DegenerateFeature(format!("all {} values equal {}", values.len(), sorted[0])));
    }

    let mut best: Option<(i64, f64, QuantizerSpec)> = None;
    for &lp in &LOWER_PCTS {
        for &up in &UPPER_PCTS {
            let lo = percentile(&sorted, lp);
            let hi = percentile(&sorted, up);
            if !(hi > lo) {
                continue;
            }
            let spec = QuantizerSpec { clip_lo: lo, clip_hi: hi, levels };
            let mut table = vec![vec![0u64; n_cls]; levels];
            for (&v, &l) in values.iter().zip(labels) {
                table[quantize(v, &spec)][l] += 1;
            }
            let key = score_key(chi2_statistic(&table));
            let width = hi - lo;
            let better = match &best {
                None => true,
                Some((bk, bw, _)) => key > *bk || (key == *bk && width > *bw),
            };
            if better {
                best = Some((key, width, spec));
            }
        }
    }
    // The (0, 100) candidate spans min..max, which is non-degenerate here.
    Ok(best.expect("at least one candidate").2)
}
